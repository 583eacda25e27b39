"""Base configuration classes for all distnet modules."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class BaseSolverConfig(BaseModel):
    """Base configuration for numerical routines.

    Contains tolerances and solver settings only.
    Does NOT contain the network or the run horizon (those go in a RunSpec).
    """

    model_config = ConfigDict(frozen=True, extra="forbid")


class BaseRunSpec(BaseModel):
    """Base specification for a single run.

    Contains runtime parameters (what to run).
    Passed to ``Simulator.run()`` and the CLI commands.
    """

    seed: Optional[int] = Field(
        default=None,
        ge=0,
        lt=2**64,
        description="64-bit seed for randomized initial states (None = use given state)",
    )

    model_config = ConfigDict(frozen=False, extra="forbid")


class SimulationConfig(BaseSolverConfig):
    """Fixed-step Runge-Kutta settings."""

    step: float = Field(default=1e-3, gt=0, description="Integration step in time units")
    max_step_halvings: int = Field(
        default=6,
        ge=0,
        description="How many times the step may be halved when conservation fails",
    )
    min_step: float = Field(
        default=1e-7, gt=0, description="Smallest admissible step before giving up"
    )
    conservation_tol: float = Field(
        default=1e-6,
        gt=0,
        description="Allowed drift of 1^T x per (1 + t) time units",
    )
    record_every: int = Field(
        default=10, ge=1, description="Record one sample every N integration steps"
    )


class ClassificationConfig(BaseSolverConfig):
    """Thresholds used to classify a trajectory."""

    consensus_tol: float = Field(
        default=1e-3, gt=0, description="Max spread of dH/dx at the final time for consensus"
    )
    divergence_factor: float = Field(
        default=1e3, gt=0, description="Blow-up threshold on ||x|| relative to 1 + ||x(0)||"
    )
    divergence_rate_tol: float = Field(
        default=1e-2, gt=0, description="Min fitted growth rate of ||x|| to call divergence"
    )
    trailing_fraction: float = Field(
        default=0.2,
        gt=0,
        lt=1,
        description="Fraction of the horizon used as the stationarity window",
    )
    stabilization_tol: float = Field(
        default=1e-3,
        gt=0,
        description="Max drift of dH/dx and of the flows inside the stationarity window",
    )
    spread_shrink_rtol: float = Field(
        default=1e-2,
        gt=0,
        description="Max relative decrease of the dH/dx spread across the window for clustering",
    )


class AnalysisConfig(BaseSolverConfig):
    """Tolerances and search bounds for the static analysis."""

    interior_tol: float = Field(
        default=1e-9, gt=0, description="Intersection width separating interior from a point"
    )
    matching_rtol: float = Field(
        default=1e-9, gt=0, description="Matching residual tolerance relative to 1 + ||E d||"
    )
    max_alternative_covers: int = Field(
        default=16, ge=1, description="Cycle decompositions of the minimal cover to try"
    )
    max_assignments: int = Field(
        default=5040, ge=1, description="Cycle-to-copy assignments tried over all covers"
    )
