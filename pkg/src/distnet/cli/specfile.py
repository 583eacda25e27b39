"""JSON network spec files: parsing, validation and serialization."""

import json
import logging
import math
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from distnet.common.exceptions import InvalidGraphError, SpecFileError
from distnet.constraints.models import ConstrainedNetwork, EdgeMapping, FlowConstraint
from distnet.dynamics.hamiltonians import NamedHamiltonian, QuadraticHamiltonian
from distnet.dynamics.models import Mode, NetworkState, NetworkSystem
from distnet.graph.models import DirectedGraph, TerminalPattern

logger = logging.getLogger(__name__)

SPEC_SCHEMA_VERSION = 1

HamiltonianSpec = Annotated[
    Union[QuadraticHamiltonian, NamedHamiltonian], Field(discriminator="kind")
]


class EdgeSpec(BaseModel):
    """One edge record: tail -> head with flow interval [lo, hi]."""

    tail: int = Field(..., ge=0, description="Tail vertex id")
    head: int = Field(..., ge=0, description="Head vertex id")
    lo: Optional[float] = Field(default=None, description="Lower flow bound u-")
    hi: Optional[float] = Field(default=None, description="Upper flow bound u+")

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def check_interval(self) -> "EdgeSpec":
        if (self.lo is None) != (self.hi is None):
            raise ValueError("give both lo and hi or neither")
        if self.lo is not None:
            if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
                raise ValueError(f"interval [{self.lo}, {self.hi}] must be finite")
            if not self.lo < self.hi:
                raise ValueError(f"interval [{self.lo}, {self.hi}] needs lo < hi")
        return self


class TerminalSpec(BaseModel):
    """A terminal vertex: sign +1 for an inflow, -1 for an outflow."""

    vertex: int = Field(..., ge=0, description="Terminal vertex id")
    sign: Literal[1, -1] = Field(..., description="+1 source, -1 sink")

    model_config = ConfigDict(extra="forbid")


class NetworkSpecFile(BaseModel):
    """Document describing a network system and its initial condition.

    Example:
        ```json
        {
          "schema_version": 1,
          "name": "triangle",
          "vertices": 3,
          "edges": [
            {"tail": 0, "head": 1, "lo": 1, "hi": 2.5},
            {"tail": 1, "head": 2, "lo": 2, "hi": 3},
            {"tail": 2, "head": 0, "lo": 0, "hi": 3}
          ]
        }
        ```
    """

    schema_version: Literal[1] = Field(default=SPEC_SCHEMA_VERSION, description="Format version")
    name: Optional[str] = Field(default=None, description="Free-form label")
    vertices: int = Field(..., ge=1, description="Number of vertices")
    edges: List[EdgeSpec] = Field(default_factory=list, description="Edge records in id order")
    terminals: List[TerminalSpec] = Field(default_factory=list, description="Terminal columns of E")
    disturbance: List[float] = Field(default_factory=list, description="Constant in/outflow per terminal")
    hamiltonian: HamiltonianSpec = Field(
        default_factory=QuadraticHamiltonian, description="Storage function"
    )
    mode: Mode = Field(default="constrained", description="Closed-loop variant")
    gain: Optional[List[float]] = Field(default=None, description="Diagonal gain R per edge")
    controller_weights: Optional[List[float]] = Field(
        default=None, description="Weights W of H_c per edge (unconstrained mode)"
    )
    initial_state: Optional[NetworkState] = Field(default=None, description="Explicit x(0), x_c(0)")
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64, description="Seed for a random x(0)")
    initial_scale: float = Field(default=1.0, gt=0, description="Range of random initial states")

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def check_intervals_for_mode(self) -> "NetworkSpecFile":
        if self.mode == "constrained":
            missing = [j for j, e in enumerate(self.edges) if e.lo is None]
            if missing:
                raise ValueError(f"constrained mode needs lo/hi on edges {missing}")
        return self

    def graph(self) -> DirectedGraph:
        return DirectedGraph(n=self.vertices, edges=tuple((e.tail, e.head) for e in self.edges))

    def to_system(self) -> NetworkSystem:
        """Build the NetworkSystem this document describes."""
        constraints = None
        if self.mode == "constrained":
            constraints = tuple(FlowConstraint(lo=e.lo, hi=e.hi) for e in self.edges)
        return NetworkSystem(
            graph=self.graph(),
            constraints=constraints,
            mode=self.mode,
            hamiltonian=self.hamiltonian,
            terminals=TerminalPattern(columns=tuple((t.vertex, t.sign) for t in self.terminals)),
            disturbance=tuple(self.disturbance),
            gain=None if self.gain is None else tuple(self.gain),
            controller_weights=(
                None if self.controller_weights is None else tuple(self.controller_weights)
            ),
        )

    def with_network(
        self, net: ConstrainedNetwork, mapping: Optional[EdgeMapping] = None
    ) -> "NetworkSpecFile":
        """Same document on a rewritten network with the disturbance absorbed.

        An explicit initial controller state is carried over through ``mapping``.
        """
        initial = self.initial_state
        if initial is not None and mapping is not None:
            initial = NetworkState.from_arrays(
                initial.x_array, mapping.map_state(initial.xc_array)
            )
        return self.model_copy(
            update=dict(
                edges=[
                    EdgeSpec(tail=t, head=h, lo=c.lo, hi=c.hi)
                    for (t, h), c in zip(net.graph.edges, net.constraints)
                ],
                terminals=[],
                disturbance=[],
                gain=None,
                controller_weights=None,
                initial_state=initial,
            )
        )


def _location(error: ValidationError) -> str:
    first = error.errors()[0]
    return ".".join(str(part) for part in first["loc"]) or "document"


def parse_spec(text: str) -> NetworkSpecFile:
    """Parse and validate a spec document.

    Raises:
        SpecFileError: With ``line X, column Y`` for malformed JSON, the
            field path for schema violations, or ``network`` when the parts
            do not fit together
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecFileError(e.msg, location=f"line {e.lineno}, column {e.colno}") from e

    try:
        spec = NetworkSpecFile.model_validate(data)
    except ValidationError as e:
        raise SpecFileError(e.errors()[0]["msg"], location=_location(e)) from e

    try:
        spec.to_system()
    except ValidationError as e:
        raise SpecFileError(e.errors()[0]["msg"], location="network") from e
    except InvalidGraphError as e:
        raise SpecFileError(str(e), location="network") from e
    return spec


def load_spec(path: Union[str, Path]) -> NetworkSpecFile:
    """Read and parse a spec file."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise SpecFileError(f"cannot read spec file: {e}", location=str(path)) from e
    spec = parse_spec(text)
    logger.debug(f"Loaded spec '{spec.name or path}': {spec.vertices} vertices, {len(spec.edges)} edges")
    return spec


def dump_spec(spec: NetworkSpecFile) -> str:
    """Serialize to indented JSON; ``parse_spec(dump_spec(s)) == s``."""
    return json.dumps(spec.model_dump(mode="json", exclude_none=True), indent=2) + "\n"
