"""Closed-loop simulation, Lyapunov functions and trajectory classification."""

from distnet.dynamics.classify import classify_trajectory, cluster_values
from distnet.dynamics.closed_loop import (
    ClosedLoop,
    build_rhs,
    rhs_constrained,
    rhs_proportional,
    rhs_unconstrained,
)
from distnet.dynamics.hamiltonians import (
    CustomHamiltonian,
    Hamiltonian,
    NamedHamiltonian,
    QuadraticHamiltonian,
)
from distnet.dynamics.integrator import (
    Simulator,
    build_trajectory,
    conservation_residual,
    simulate,
)
from distnet.dynamics.lyapunov import (
    lyapunov_sat,
    lyapunov_sat_series,
    lyapunov_unconstrained,
    lyapunov_unconstrained_series,
    matching_controller_state,
    predict_consensus,
)
from distnet.dynamics.models import (
    NetworkState,
    NetworkSystem,
    SimulateSpec,
    SimulationResult,
    Trajectory,
    TrajectoryClass,
)

__all__ = [
    # Storage functions
    'Hamiltonian',
    'QuadraticHamiltonian',
    'NamedHamiltonian',
    'CustomHamiltonian',
    # Models
    'NetworkState',
    'NetworkSystem',
    'SimulateSpec',
    'Trajectory',
    'TrajectoryClass',
    'SimulationResult',
    # Closed loops
    'ClosedLoop',
    'build_rhs',
    'rhs_constrained',
    'rhs_unconstrained',
    'rhs_proportional',
    # Integration
    'simulate',
    'build_trajectory',
    'conservation_residual',
    'Simulator',
    # Lyapunov
    'lyapunov_sat',
    'lyapunov_sat_series',
    'lyapunov_unconstrained',
    'lyapunov_unconstrained_series',
    'matching_controller_state',
    'predict_consensus',
    # Classification
    'classify_trajectory',
    'cluster_values',
]
