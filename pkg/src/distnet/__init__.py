"""distnet - Simulation and stability certification of distribution networks under saturated PI control."""

__version__ = "0.1.0"

# Import common utilities so they're available at package level
from distnet.common import (
    AnalysisConfig,
    BaseRunSpec,
    BaseSolverConfig,
    ClassificationConfig,
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
    SimulationConfig,
    SpecFileError,
)
from distnet.common.logging_config import disable_logging, setup_logging

__all__ = [
    '__version__',
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
    # Logging
    'setup_logging',
    'disable_logging',
]
