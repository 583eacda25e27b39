"""Pydantic models for network systems, states and trajectories."""

import csv
import io
from pathlib import Path
from typing import Literal, Optional, TextIO, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from distnet.common.config import BaseRunSpec
from distnet.constraints.models import ConstrainedNetwork, FlowConstraint
from distnet.dynamics.hamiltonians import Hamiltonian, QuadraticHamiltonian
from distnet.graph.models import DirectedGraph, TerminalPattern

Mode = Literal["constrained", "unconstrained", "proportional"]


class NetworkState(BaseModel):
    """Storage per vertex and controller state per edge."""

    x: Tuple[float, ...] = Field(..., description="Storage x per vertex")
    xc: Tuple[float, ...] = Field(default=(), description="Controller state x_c per edge")

    model_config = ConfigDict(frozen=True)

    @classmethod
    def from_arrays(cls, x: np.ndarray, xc: np.ndarray) -> "NetworkState":
        return cls(
            x=tuple(float(v) for v in np.ravel(x)),
            xc=tuple(float(v) for v in np.ravel(xc)),
        )

    @classmethod
    def random(cls, n: int, m: int, seed: int, scale: float = 1.0) -> "NetworkState":
        """Uniform draw from [-scale, scale] for every component.

        The same seed always gives the same state.
        """
        rng = np.random.default_rng(seed)
        x = rng.uniform(-scale, scale, size=n)
        xc = rng.uniform(-scale, scale, size=m)
        return cls.from_arrays(x, xc)

    @property
    def x_array(self) -> np.ndarray:
        return np.array(self.x, dtype=float)

    @property
    def xc_array(self) -> np.ndarray:
        return np.array(self.xc, dtype=float)

    def pack(self) -> np.ndarray:
        """Concatenate [x, x_c] into one integration vector."""
        return np.concatenate([self.x_array, self.xc_array])


class NetworkSystem(BaseModel):
    """A distribution network together with its storage function and controller.

    ``mode`` selects the closed loop:

    - ``constrained``: saturated PI control, R = I and H_c = 1/2 ||x_c||^2.
    - ``unconstrained``: PI control with diagonal gain R and quadratic H_c.
    - ``proportional``: u = -R B^T dH/dx, no integral action.
    """

    graph: DirectedGraph = Field(..., description="Network topology")
    constraints: Optional[Tuple[FlowConstraint, ...]] = Field(
        default=None, description="Flow interval per edge (constrained mode only)"
    )
    mode: Mode = Field(default="constrained", description="Closed-loop variant")
    hamiltonian: Hamiltonian = Field(
        default_factory=QuadraticHamiltonian, description="Storage function H(x)"
    )
    terminals: TerminalPattern = Field(
        default_factory=TerminalPattern, description="Terminal pattern E"
    )
    disturbance: Tuple[float, ...] = Field(
        default=(), description="Constant in/outflow d per terminal column"
    )
    gain: Optional[Tuple[float, ...]] = Field(
        default=None, description="Diagonal of R (unconstrained/proportional only)"
    )
    controller_weights: Optional[Tuple[float, ...]] = Field(
        default=None,
        description="Weights w of H_c(x_c) = sum 1/2 w_i x_c,i^2 (unconstrained only)",
    )

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("gain", "controller_weights")
    @classmethod
    def check_positive(cls, v: Optional[Tuple[float, ...]]) -> Optional[Tuple[float, ...]]:
        if v is not None and any(g <= 0 for g in v):
            raise ValueError("gains and controller weights must be strictly positive")
        return v

    @model_validator(mode="after")
    def check_consistency(self) -> "NetworkSystem":
        """Dimensions must agree and constrained mode keeps R = I, H_c quadratic."""
        n, m = self.graph.n, self.graph.m
        if len(self.disturbance) != self.terminals.k:
            raise ValueError(
                f"disturbance has {len(self.disturbance)} entries for {self.terminals.k} terminals"
            )
        for k, (vertex, _) in enumerate(self.terminals.columns):
            if vertex >= n:
                raise ValueError(f"terminal {k} references vertex {vertex} >= {n}")
        for name in ("gain", "controller_weights"):
            value = getattr(self, name)
            if value is not None and len(value) != m:
                raise ValueError(f"{name} has {len(value)} entries for {m} edges")
        weights = getattr(self.hamiltonian, "weights", None)
        if weights is not None and len(weights) != n:
            raise ValueError(f"hamiltonian has {len(weights)} weights for {n} vertices")

        if self.mode == "constrained":
            if self.constraints is None or len(self.constraints) != m:
                raise ValueError(f"constrained mode needs one flow interval per edge ({m})")
            if self.gain is not None and any(g != 1.0 for g in self.gain):
                raise ValueError("constrained mode fixes the gain R = I")
            if self.controller_weights is not None and any(
                w != 1.0 for w in self.controller_weights
            ):
                raise ValueError("constrained mode fixes H_c(x_c) = 1/2 ||x_c||^2")
        elif self.mode == "proportional" and self.controller_weights is not None:
            raise ValueError("proportional mode has no controller state")
        return self

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    @property
    def network(self) -> ConstrainedNetwork:
        """The graph with its flow intervals (constrained mode only)."""
        if self.constraints is None:
            raise ValueError(f"{self.mode} system has no flow constraints")
        return ConstrainedNetwork(graph=self.graph, constraints=self.constraints)

    @property
    def dbar(self) -> np.ndarray:
        return np.array(self.disturbance, dtype=float)

    @property
    def inflow(self) -> np.ndarray:
        """E d per vertex."""
        if self.terminals.k == 0:
            return np.zeros(self.n)
        return self.terminals.inflow(self.n, self.dbar)

    @property
    def gain_array(self) -> np.ndarray:
        return np.ones(self.m) if self.gain is None else np.array(self.gain, dtype=float)

    @property
    def controller_weight_array(self) -> np.ndarray:
        if self.controller_weights is None:
            return np.ones(self.m)
        return np.array(self.controller_weights, dtype=float)

    def with_network(
        self,
        net: ConstrainedNetwork,
        terminals: Optional[TerminalPattern] = None,
        disturbance: Optional[Tuple[float, ...]] = None,
    ) -> "NetworkSystem":
        """Same storage function and mode on a rewritten network."""
        terminals = self.terminals if terminals is None else terminals
        disturbance = self.disturbance if disturbance is None else tuple(disturbance)
        return NetworkSystem(
            graph=net.graph,
            constraints=net.constraints,
            mode=self.mode,
            hamiltonian=self.hamiltonian,
            terminals=terminals,
            disturbance=disturbance,
        )


class SimulateSpec(BaseRunSpec):
    """What to simulate: horizon and initial condition.

    When ``initial_state`` is None the state is drawn uniformly from
    [-initial_scale, initial_scale] using ``seed``.
    """

    horizon: float = Field(default=200.0, gt=0, description="Final time T")
    initial_state: Optional[NetworkState] = Field(
        default=None, description="Explicit x(0), x_c(0)"
    )
    initial_scale: float = Field(default=1.0, gt=0, description="Range of random initial states")

    def resolve_state(self, system: NetworkSystem) -> NetworkState:
        """The explicit initial state, or a seeded random one."""
        if self.initial_state is not None:
            return self.initial_state
        seed = 0 if self.seed is None else self.seed
        return NetworkState.random(system.n, system.m, seed, self.initial_scale)


class Trajectory(BaseModel):
    """Recorded samples of a simulation.

    Arrays have one row per sample; ``grad`` holds dH/dx(x) so a trajectory
    can be classified without the system.
    """

    times: np.ndarray = Field(..., description="Strictly increasing sample times")
    x: np.ndarray = Field(..., description="Storage samples, shape (N, n)")
    xc: np.ndarray = Field(..., description="Controller samples, shape (N, m)")
    u: np.ndarray = Field(..., description="Flow samples, shape (N, m)")
    grad: np.ndarray = Field(..., description="dH/dx samples, shape (N, n)")
    V: np.ndarray = Field(..., description="Lyapunov function per sample")
    sum_x: np.ndarray = Field(..., description="Total storage per sample")
    step: float = Field(..., gt=0, description="Integration step actually used")
    mode: Mode = Field(default="constrained", description="Closed loop that produced it")
    seed: Optional[int] = Field(default=None, description="Seed of the initial state, if random")
    complete: bool = Field(default=True, description="False for a partial trajectory")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def check_samples(self) -> "Trajectory":
        count = self.times.shape[0]
        for name in ("x", "xc", "u", "grad", "V", "sum_x"):
            if getattr(self, name).shape[0] != count:
                raise ValueError(f"{name} has {getattr(self, name).shape[0]} samples, expected {count}")
        if count > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("sample times must be strictly increasing")
        return self

    def __len__(self) -> int:
        return int(self.times.shape[0])

    @property
    def n(self) -> int:
        return int(self.x.shape[1])

    @property
    def m(self) -> int:
        return int(self.xc.shape[1])

    @property
    def final_state(self) -> NetworkState:
        return NetworkState.from_arrays(self.x[-1], self.xc[-1])

    def header(self) -> list[str]:
        """CSV column names: t, x_i, xc_j, u_j, V, sum_x."""
        return (
            ["t"]
            + [f"x_{i}" for i in range(self.n)]
            + [f"xc_{j}" for j in range(self.m)]
            + [f"u_{j}" for j in range(self.m)]
            + ["V", "sum_x"]
        )

    def rows(self) -> np.ndarray:
        return np.column_stack(
            [self.times, self.x, self.xc, self.u, self.V, self.sum_x]
        )

    def write_csv(self, stream: TextIO) -> None:
        """Write the trajectory as CSV with full float precision."""
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(self.header())
        for row in self.rows():
            writer.writerow([repr(float(v)) for v in row])

    def to_csv(self, path: Optional[Union[str, Path]] = None) -> str:
        """Return the CSV text and optionally write it to ``path``."""
        buffer = io.StringIO()
        self.write_csv(buffer)
        text = buffer.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    def to_frame(self):
        """pandas DataFrame with the CSV columns (needs the ``pandas`` extra)."""
        try:
            import pandas as pd
        except ImportError as e:
            raise ImportError("to_frame() needs pandas: pip install distnet[pandas]") from e
        return pd.DataFrame(self.rows(), columns=self.header())


class TrajectoryClass(BaseModel):
    """Long-time behaviour read off a trajectory."""

    kind: Literal["consensus", "clustering", "divergent", "undecided"] = Field(
        ..., description="Detected behaviour"
    )
    spread: float = Field(..., description="max - min of dH/dx at the final time")
    growth_rate: float = Field(default=0.0, description="Fitted slope of ||x|| over the trailing half")
    alpha: Optional[float] = Field(default=None, description="Consensus value of dH/dx")
    clusters: Tuple[float, ...] = Field(default=(), description="Cluster values of dH/dx")
    message: Optional[str] = Field(default=None, description="Why no criterion applied")

    model_config = ConfigDict(frozen=True)


class SimulationResult(BaseModel):
    """Outcome of one ``Simulator.run`` call.

    ``status`` is 'failed' when integration broke down; ``trajectory`` then
    holds the partial samples, if any.
    """

    status: Literal["success", "failed"] = Field(..., description="Run outcome")
    trajectory: Optional[Trajectory] = Field(default=None, description="Recorded samples")
    classification: Optional[TrajectoryClass] = Field(default=None, description="Detected behaviour")
    predicted_alpha: Optional[float] = Field(
        default=None, description="Consensus value implied by the conserved storage"
    )
    final_V: Optional[float] = Field(default=None, description="Lyapunov function at T")
    conservation_residual: Optional[float] = Field(
        default=None, description="max |1^T x(t) - 1^T x(0) - t 1^T E d| / (1 + t)"
    )
    seed: Optional[int] = Field(default=None, description="Seed of a random initial state")
    error: Optional[str] = Field(default=None, description="Error message if failed")

    model_config = ConfigDict(arbitrary_types_allowed=True)
