"""Static analysis pipeline: absorb, normalize, then decide or certify."""

import logging
from typing import Iterable, List, Optional, Set, Tuple

import numpy as np

from distnet.analysis.certificate import certify_consensus
from distnet.analysis.cycle import analyze_cycle
from distnet.analysis.models import (
    ComponentVerdict,
    ConsensusCertificate,
    Inconclusive,
    StaticReport,
    Verdict,
)
from distnet.common.config import AnalysisConfig
from distnet.common.exceptions import DistNetError, InvalidConfigError, NoMatchingError
from distnet.constraints.models import ConstrainedNetwork, EdgeMapping
from distnet.constraints.transform import (
    absorb_disturbance,
    absorption_mapping,
    normalize_orientation,
)
from distnet.cycles.models import DirectedCycle
from distnet.dynamics.models import NetworkSystem
from distnet.graph.core import (
    bridging_edges,
    is_balanced,
    is_strongly_connected,
    strongly_connected_components,
    upstream_closure,
)
from distnet.graph.models import DirectedGraph
from distnet.graph.matching import MatchResult, check_matching

logger = logging.getLogger(__name__)

_CYCLE_VERDICTS = {
    "consensus": Verdict.CONSENSUS,
    "clustering": Verdict.CLUSTERING,
    "unstable": Verdict.UNSTABLE,
}


def restrict_to_component(
    net: ConstrainedNetwork, vertices: Iterable[int]
) -> Tuple[ConstrainedNetwork, List[int]]:
    """Sub-network spanned by the edges with both ends in ``vertices``.

    Vertices are relabeled in ascending order.

    Returns:
        ``(sub_network, edge_ids)`` where ``edge_ids[k]`` is the id in ``net``
        of edge k of the sub-network
    """
    order = sorted(vertices)
    local = {v: i for i, v in enumerate(order)}
    edge_ids = [
        j for j, (tail, head) in enumerate(net.graph.edges) if tail in local and head in local
    ]
    sub = ConstrainedNetwork(
        graph=DirectedGraph(
            n=len(order),
            edges=tuple(
                (local[net.graph.edges[j][0]], local[net.graph.edges[j][1]]) for j in edge_ids
            ),
        ),
        constraints=tuple(net.constraints[j] for j in edge_ids),
    )
    return sub, edge_ids


def _analyze_component(
    net: ConstrainedNetwork, vertices: Set[int], source: bool, config: AnalysisConfig
) -> ComponentVerdict:
    sub, edge_ids = restrict_to_component(net, vertices)
    common = dict(vertices=tuple(sorted(vertices)), edges=tuple(edge_ids), source=source)
    if is_balanced(sub.graph) and sub.graph.m == sub.graph.n:
        cycle = DirectedCycle.from_edges(sub.graph, range(sub.graph.m))
        local = analyze_cycle(sub, cycle, config.interior_tol)
        cycle_verdict = local.model_copy(
            update={"cycle": tuple(edge_ids[k] for k in local.cycle)}
        )
        return ComponentVerdict(
            verdict=_CYCLE_VERDICTS[local.classification], cycle_verdict=cycle_verdict, **common
        )

    outcome = certify_consensus(sub, config)
    if isinstance(outcome, ConsensusCertificate):
        return ComponentVerdict(verdict=Verdict.CERTIFIED_CONSENSUS, certificate=outcome, **common)
    return ComponentVerdict(verdict=Verdict.INCONCLUSIVE, inconclusive=outcome, **common)


def _analyze_components(
    normalized: ConstrainedNetwork, config: AnalysisConfig, report: dict
) -> StaticReport:
    """Verdict for a graph that is not strongly connected.

    In order:

    - An edge between components with a positive lower bound drains the set
      of vertices upstream of its tail, which has no inflow: ``UNSTABLE``.
    - A source component that is a cycle with an empty intersection loses
      storage on the path between its two incompatible edges: ``UNSTABLE``.
    - Any other component that cannot be shown to settle: ``INCONCLUSIVE``.
    - Otherwise ``EQUILIBRIUM_WITHOUT_CONSENSUS``; exact when every
      component is a single vertex, sufficient when it rests on the verdicts
      of larger components.
    """
    graph = normalized.graph
    bridging = bridging_edges(graph)

    draining = [j for j in bridging if normalized.constraints[j].lo > 0]
    if draining:
        drained: Set[int] = set()
        for j in draining:
            drained |= upstream_closure(graph, graph.edges[j][0])
        logger.info(f"Edges {draining} leave a closed upstream set with positive lower bound")
        return StaticReport(
            verdict=Verdict.UNSTABLE,
            epistemic="exact",
            strongly_connected=False,
            draining_edges=draining,
            drained_vertices=sorted(drained),
            message=(
                f"edges {draining} carry a positive minimum flow out of vertices "
                f"{sorted(drained)}, which have no inflow; their storage decreases without bound"
            ),
            **report,
        )

    entered = {graph.edges[j][1] for j in bridging}
    components = [
        _analyze_component(normalized, vertices, source=not (vertices & entered), config=config)
        for vertices in strongly_connected_components(graph)
        if len(vertices) > 1
    ]

    unstable = [c for c in components if c.verdict == Verdict.UNSTABLE and c.source]
    if unstable:
        ids = [list(c.vertices) for c in unstable]
        logger.info(f"Source components {ids} are cycles with an empty intersection")
        return StaticReport(
            verdict=Verdict.UNSTABLE,
            epistemic="exact",
            strongly_connected=False,
            components=components,
            message=(
                f"components {ids} receive no inflow and their cycle intervals do not "
                "intersect; storage diverges"
            ),
            **report,
        )

    open_components = [c for c in components if not c.settled]
    if open_components:
        ids = [list(c.vertices) for c in open_components]
        logger.info(f"Components {ids} could not be shown to settle")
        return StaticReport(
            verdict=Verdict.INCONCLUSIVE,
            epistemic="none",
            strongly_connected=False,
            components=components,
            inconclusive=Inconclusive(
                reason="component_not_certified",
                message=f"components {ids} are neither certified nor provably unstable",
            ),
            message=f"components {ids} are neither certified nor provably unstable",
            **report,
        )

    logger.info("Graph not strongly connected; no edge is forced to drain")
    return StaticReport(
        verdict=Verdict.EQUILIBRIUM_WITHOUT_CONSENSUS,
        epistemic="sufficient" if components else "exact",
        strongly_connected=False,
        components=components,
        message=(
            "graph is not strongly connected: consensus is not guaranteed, "
            "but a steady state without consensus is possible"
        ),
        **report,
    )


def analyze_network(system: NetworkSystem, config: Optional[AnalysisConfig] = None) -> StaticReport:
    """Run the full static analysis on a constrained system.

    Steps:

    1. Check the matching condition and absorb the disturbance into the
       flow intervals.
    2. Reverse or split edges until every interval has u+ > 0, u- >= 0.
    3. Not strongly connected: draining edges and the strongly connected
       components decide between ``UNSTABLE``, ``INCONCLUSIVE`` and
       ``EQUILIBRIUM_WITHOUT_CONSENSUS`` (see ``_analyze_components``).
    4. A single cycle gets the exact intersection verdict.
    5. Anything else goes to the certificate search, which yields
       ``CERTIFIED_CONSENSUS`` or ``INCONCLUSIVE``.

    Args:
        system: Constrained-mode system
        config: Tolerances and search bounds

    Returns:
        StaticReport with the verdict and every transformation artifact

    Raises:
        InvalidConfigError: If the system has no flow constraints
        NoMatchingError: If the disturbance cannot be matched
    """
    config = config or AnalysisConfig()
    if system.mode != "constrained":
        raise InvalidConfigError(f"static analysis needs a constrained system, got {system.mode}")

    net = system.network
    if system.terminals.k and np.any(system.dbar):
        match = check_matching(system.terminals, system.dbar, system.graph, rtol=config.matching_rtol)
        if not match.matchable:
            raise NoMatchingError(
                f"disturbance cannot be matched ({match.failure}, net inflow "
                f"{match.total_inflow:g}, residual {match.residual:.3e})",
                result=match,
            )
        absorbed, xbar = absorb_disturbance(
            net, system.terminals, system.dbar, rtol=config.matching_rtol
        )
        mapping = absorption_mapping(xbar)
    else:
        match = MatchResult(
            matchable=True, total_inflow=0.0, residual=0.0, xbar_c=(0.0,) * system.m
        )
        absorbed, xbar = net, np.zeros(system.m)
        mapping = EdgeMapping.identity(system.m)

    normalized, orientation = normalize_orientation(absorbed)
    mapping = mapping.compose(orientation)
    graph = normalized.graph

    report = dict(
        match=match,
        xbar_c=tuple(float(v) for v in xbar),
        network=normalized,
        mapping=mapping,
    )

    if graph.n == 1:
        return StaticReport(
            verdict=Verdict.CONSENSUS,
            epistemic="exact",
            strongly_connected=True,
            message="single vertex: trivially in consensus",
            **report,
        )

    if not is_strongly_connected(graph):
        return _analyze_components(normalized, config, report)

    if is_balanced(graph) and graph.m == graph.n:
        verdict = analyze_cycle(
            normalized, DirectedCycle.from_edges(graph, range(graph.m)), config.interior_tol
        )
        return StaticReport(
            verdict=_CYCLE_VERDICTS[verdict.classification],
            epistemic="exact",
            strongly_connected=True,
            cycle_verdict=verdict,
            message=(
                f"single cycle, intersection [{verdict.lower:g}, {verdict.upper:g}]: "
                f"{verdict.classification}"
            ),
            **report,
        )

    outcome = certify_consensus(normalized, config)
    if isinstance(outcome, ConsensusCertificate):
        return StaticReport(
            verdict=Verdict.CERTIFIED_CONSENSUS,
            epistemic="sufficient",
            strongly_connected=True,
            certificate=outcome,
            message=f"consensus certified with minimum intersection width {outcome.margin:g}",
            **report,
        )
    return StaticReport(
        verdict=Verdict.INCONCLUSIVE,
        epistemic="none",
        strongly_connected=True,
        inconclusive=outcome,
        message=outcome.message,
        **report,
    )


class NetworkAnalyzer:
    """High-level static analyzer.

    Never raises on analysis failures; they come back as a report with
    ``status='failed'``.
    """

    def __init__(self, config: Optional[AnalysisConfig] = None):
        """Initialize analyzer.

        Args:
            config: Tolerances and search bounds
        """
        self.config = config or AnalysisConfig()

    def analyze(self, system: NetworkSystem) -> StaticReport:
        """Analyze ``system`` and report the verdict.

        Example:
            ```python
            analyzer = NetworkAnalyzer()
            report = analyzer.analyze(system)
            if report.status == 'success':
                print(report.verdict.value, report.epistemic)
            ```
        """
        try:
            report = analyze_network(system, self.config)
        except NoMatchingError as e:
            logger.error(f"Analysis failed: {e}")
            return StaticReport(status="failed", match=e.result, error=str(e))
        except DistNetError as e:
            logger.error(f"Analysis failed: {e}")
            return StaticReport(status="failed", error=str(e))

        logger.info(f"Verdict: {report.verdict.value} ({report.epistemic})")
        return report
