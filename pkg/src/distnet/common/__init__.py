"""Common utilities and base classes for all distnet modules."""

from distnet.common.config import (
    AnalysisConfig,
    BaseRunSpec,
    BaseSolverConfig,
    ClassificationConfig,
    SimulationConfig,
)
from distnet.common.exceptions import (
    ConservationError,
    DistNetError,
    IncompatibleOrientationError,
    IntegrationError,
    InvalidBreakpointsError,
    InvalidConfigError,
    InvalidGraphError,
    NoMatchingError,
    NotACycleError,
    NotBalancedError,
    NotStronglyConnectedError,
    SpecFileError,
)
from distnet.common.retry import with_step_halving

__all__ = [
    # Config
    'BaseSolverConfig',
    'BaseRunSpec',
    'SimulationConfig',
    'ClassificationConfig',
    'AnalysisConfig',
    # Exceptions
    'DistNetError',
    'InvalidConfigError',
    'InvalidGraphError',
    'NotStronglyConnectedError',
    'NotBalancedError',
    'NotACycleError',
    'IncompatibleOrientationError',
    'InvalidBreakpointsError',
    'NoMatchingError',
    'ConservationError',
    'IntegrationError',
    'SpecFileError',
    # Step control
    'with_step_halving',
]
