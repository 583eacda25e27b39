"""Pydantic models for static stability verdicts and certificates."""

from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from distnet.constraints.models import ConstrainedNetwork, EdgeMapping
from distnet.cycles.models import CycleCover
from distnet.graph.matching import MatchResult

REPORT_SCHEMA_VERSION = 1


class Verdict(str, Enum):
    """Outcome of the static analysis of a network."""

    CONSENSUS = "consensus"
    CLUSTERING = "clustering"
    UNSTABLE = "unstable"
    CERTIFIED_CONSENSUS = "certified_consensus"
    INCONCLUSIVE = "inconclusive"
    EQUILIBRIUM_WITHOUT_CONSENSUS = "equilibrium_without_consensus"


class CycleVerdict(BaseModel):
    """Exact verdict for a single directed cycle.

    The witness [lower, upper] is the intersection of the member intervals;
    it is empty when ``upper < lower``.
    """

    classification: Literal["consensus", "clustering", "unstable"] = Field(
        ..., description="Trichotomy by the width of the intersection"
    )
    cycle: Tuple[int, ...] = Field(..., description="Edge ids in traversal order")
    lower: float = Field(..., description="max of the lower bounds")
    upper: float = Field(..., description="min of the upper bounds")
    boundary: bool = Field(
        default=False,
        description="Width within the interior tolerance but not exactly zero",
    )

    model_config = ConfigDict(frozen=True)

    @property
    def width(self) -> float:
        return self.upper - self.lower


class CycleIntersection(BaseModel):
    """Intersection of the assigned sub-intervals along one augmented cycle."""

    cycle: Tuple[int, ...] = Field(..., description="Edge ids of the cycle in the original graph")
    copies: Tuple[int, ...] = Field(..., description="Edge ids of the cycle in the augmented graph")
    lower: float = Field(..., description="max of the assigned lower bounds")
    upper: float = Field(..., description="min of the assigned upper bounds")

    model_config = ConfigDict(frozen=True)

    @property
    def width(self) -> float:
        return self.upper - self.lower


class ConsensusCertificate(BaseModel):
    """A splitting under which every covering cycle has an interior intersection.

    ``breakpoints`` and ``assignment`` are keyed by edge id of the analyzed
    (normalized) network. Re-check with ``verify_certificate``.
    """

    cover: CycleCover = Field(..., description="Covering set of cycles with multiplicity T")
    breakpoints: Dict[int, Tuple[float, ...]] = Field(
        default_factory=dict, description="Ascending breakpoints per split edge"
    )
    assignment: Dict[int, Tuple[int, ...]] = Field(
        default_factory=dict, description="Copy used by each cycle through a split edge"
    )
    intersections: Tuple[CycleIntersection, ...] = Field(
        default=(), description="Per-cycle intersection of the assigned sub-intervals"
    )
    covers_tried: int = Field(default=1, ge=1, description="Covers searched before success")
    assignments_tried: int = Field(default=1, ge=1, description="Assignments solved in total")

    model_config = ConfigDict(frozen=True)

    @property
    def margin(self) -> float:
        """Smallest intersection width over all cycles."""
        return min((c.width for c in self.intersections), default=float("inf"))


class Inconclusive(BaseModel):
    """The sufficient condition could not be established.

    This is never a statement of instability.
    """

    reason: Literal[
        "not_strongly_connected",
        "no_feasible_splitting",
        "search_limit",
        "component_not_certified",
    ] = Field(
        ..., description="Why no certificate was produced"
    )
    message: str = Field(default="", description="Human readable detail")
    covers_tried: int = Field(default=0, ge=0, description="Covers searched")
    assignments_tried: int = Field(default=0, ge=0, description="Assignments solved")
    best_margin: Optional[float] = Field(
        default=None, description="Largest achievable minimum width found (negative = infeasible)"
    )

    model_config = ConfigDict(frozen=True)


class ComponentVerdict(BaseModel):
    """Verdict for one strongly connected component of a graph that is not
    strongly connected.

    ``source`` components receive no flow from the rest of the graph, so an
    empty cycle intersection there is an exact instability.
    """

    vertices: Tuple[int, ...] = Field(..., description="Vertex ids of the component")
    edges: Tuple[int, ...] = Field(..., description="Analyzed edge ids inside the component")
    source: bool = Field(..., description="No edge enters the component from outside")
    verdict: Verdict = Field(..., description="Verdict of the component on its own")
    cycle_verdict: Optional[CycleVerdict] = Field(
        default=None, description="Exact verdict when the component is a single cycle"
    )
    certificate: Optional[ConsensusCertificate] = Field(
        default=None, description="Consensus certificate of the component"
    )
    inconclusive: Optional[Inconclusive] = Field(
        default=None, description="Why the component could not be certified"
    )

    model_config = ConfigDict(frozen=True)

    @property
    def settled(self) -> bool:
        """Component on its own admits a steady state."""
        return self.verdict in (
            Verdict.CONSENSUS,
            Verdict.CLUSTERING,
            Verdict.CERTIFIED_CONSENSUS,
        )


class StaticReport(BaseModel):
    """Result of the full static analysis pipeline.

    ``epistemic`` states how strong the verdict is: ``exact`` for single
    cycles and for instability proven by a draining edge or an unstable
    source component, ``sufficient`` for a consensus certificate or an
    equilibrium resting on certified components, ``none`` for inconclusive
    or failed runs.
    """

    schema_version: int = Field(default=REPORT_SCHEMA_VERSION, description="Report format version")
    status: Literal["success", "failed"] = Field(default="success", description="Run outcome")
    verdict: Optional[Verdict] = Field(default=None, description="Stability verdict")
    epistemic: Literal["exact", "sufficient", "none"] = Field(
        default="none", description="Strength of the verdict"
    )
    match: Optional[MatchResult] = Field(default=None, description="Matching check of the disturbance")
    xbar_c: Optional[Tuple[float, ...]] = Field(
        default=None, description="Controller offset absorbed into the intervals"
    )
    network: Optional[ConstrainedNetwork] = Field(
        default=None, description="Absorbed and normalized network that was analyzed"
    )
    mapping: Optional[EdgeMapping] = Field(
        default=None, description="Mapping from the input edges to the analyzed edges"
    )
    strongly_connected: Optional[bool] = Field(default=None, description="Of the analyzed graph")
    draining_edges: List[int] = Field(
        default_factory=list,
        description="Analyzed edges between strongly connected components with a positive lower bound",
    )
    drained_vertices: List[int] = Field(
        default_factory=list,
        description="Vertices upstream of a draining edge, whose total storage decreases",
    )
    components: List[ComponentVerdict] = Field(
        default_factory=list,
        description="Per-component verdicts when the graph is not strongly connected",
    )
    cycle_verdict: Optional[CycleVerdict] = Field(default=None, description="Exact cycle verdict")
    certificate: Optional[ConsensusCertificate] = Field(default=None, description="Consensus certificate")
    inconclusive: Optional[Inconclusive] = Field(default=None, description="Why no certificate")
    message: str = Field(default="", description="One-line summary")
    error: Optional[str] = Field(default=None, description="Error message if failed")

    @property
    def exit_code(self) -> int:
        """0 for an exact or certified verdict, 2 for inconclusive, 1 for errors."""
        if self.status == "failed" or self.verdict is None:
            return 1
        if self.verdict == Verdict.INCONCLUSIVE:
            return 2
        return 0
