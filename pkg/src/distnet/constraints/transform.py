"""Constraint-preserving rewrites of a constrained network.

All three rewrites leave the storage trajectory x(t) unchanged when the
controller states are mapped through the returned EdgeMapping:

- absorbing a matched disturbance into shifted intervals,
- reversing or splitting edges so every interval has u+ > 0, u- >= 0,
- splitting an edge into parallel copies at breakpoints.
"""

import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np

from distnet.common.exceptions import InvalidBreakpointsError, NoMatchingError
from distnet.constraints.models import ConstrainedNetwork, EdgeMapping, FlowConstraint
from distnet.graph.matching import check_matching
from distnet.graph.models import DirectedGraph, TerminalPattern

logger = logging.getLogger(__name__)


def absorb_disturbance(
    net: ConstrainedNetwork,
    terminals: TerminalPattern,
    dbar: np.ndarray,
    rtol: float = 1e-9,
) -> Tuple[ConstrainedNetwork, np.ndarray]:
    """Fold a constant in/outflow into the flow intervals.

    Solves B x_c = E d for the minimum-norm x_c and shifts every interval
    to [u- + x_c, u+ + x_c]. The shifted network, started from
    ``x_c(0) - x_c``, has the same storage dynamics as the original one
    with the disturbance.

    Args:
        net: Network with its original intervals
        terminals: Terminal pattern E
        dbar: Constant disturbance (length k)
        rtol: Matching residual tolerance relative to 1 + ||E d||

    Returns:
        ``(shifted network, xbar_c)``

    Raises:
        NoMatchingError: If 1^T E d != 0 or E d is not in im B
    """
    result = check_matching(terminals, dbar, net.graph, rtol=rtol)
    if not result.matchable:
        raise NoMatchingError(
            f"disturbance cannot be matched ({result.failure}, "
            f"net inflow {result.total_inflow:g}, residual {result.residual:.3e})",
            result=result,
        )
    xbar = result.xbar
    if not np.any(xbar):
        return net, xbar

    shifted = tuple(c.shifted(float(eta)) for c, eta in zip(net.constraints, xbar))
    logger.info(f"Absorbed disturbance into {net.graph.m} intervals (|xbar_c| = {np.linalg.norm(xbar):.4g})")
    return ConstrainedNetwork(graph=net.graph, constraints=shifted), xbar


def absorption_mapping(xbar_c: np.ndarray) -> EdgeMapping:
    """EdgeMapping of an absorption: x~_c = x_c - xbar_c and u~ = u + xbar_c."""
    xbar_c = np.asarray(xbar_c, dtype=float)
    m = xbar_c.size
    return EdgeMapping(
        original_m=m,
        source=tuple(range(m)),
        sign=(1,) * m,
        offset=tuple(float(-v) for v in xbar_c),
        flow_offset=tuple(float(v) for v in xbar_c),
    )


def normalize_orientation(net: ConstrainedNetwork) -> Tuple[ConstrainedNetwork, EdgeMapping]:
    """Make the orientation compatible with the flow intervals.

    Per edge:

    - ``lo >= 0``: kept as is.
    - ``hi <= 0``: reversed, interval [-hi, -lo], controller state negated.
    - ``lo < 0 < hi``: split at 0 into a forward copy [0, hi] and a reversed
      copy [0, -lo]; the reversed copy starts from the negated state.

    Returns:
        ``(compatible network, mapping from the input edges)``
    """
    edges: List[Tuple[int, int]] = []
    intervals: List[FlowConstraint] = []
    source: List[int] = []
    sign: List[int] = []
    reversed_count = split_count = 0

    for i, ((tail, head), c) in enumerate(zip(net.graph.edges, net.constraints)):
        if c.lo >= 0:
            edges.append((tail, head))
            intervals.append(c)
            source.append(i)
            sign.append(1)
        elif c.hi <= 0:
            edges.append((head, tail))
            intervals.append(c.negated())
            source.append(i)
            sign.append(-1)
            reversed_count += 1
        else:
            edges.append((tail, head))
            intervals.append(FlowConstraint(lo=0.0, hi=c.hi))
            source.append(i)
            sign.append(1)
            edges.append((head, tail))
            intervals.append(FlowConstraint(lo=0.0, hi=-c.lo))
            source.append(i)
            sign.append(-1)
            split_count += 1

    if reversed_count or split_count:
        logger.info(
            f"Normalized orientation: {reversed_count} edges reversed, "
            f"{split_count} bi-directional edges split"
        )

    m = net.graph.m
    mapping = EdgeMapping(
        original_m=m,
        source=tuple(source),
        sign=tuple(sign),
        offset=(0.0,) * len(source),
        flow_offset=(0.0,) * m,
    )
    normalized = ConstrainedNetwork(
        graph=DirectedGraph(n=net.graph.n, edges=tuple(edges)),
        constraints=tuple(intervals),
    )
    return normalized, mapping


def split_intervals(c: FlowConstraint, breakpoints: Sequence[float]) -> List[FlowConstraint]:
    """Sub-intervals [u-, b2], [0, b3 - b2], ..., [0, u+ - b_last] of a split.

    Raises:
        InvalidBreakpointsError: If breakpoints are not strictly increasing
            inside (u-, u+)
    """
    points = [float(b) for b in breakpoints]
    if not points:
        return [c]
    chain = [c.lo] + points + [c.hi]
    if any(not a < b for a, b in zip(chain, chain[1:])):
        raise InvalidBreakpointsError(
            f"breakpoints {points} must increase strictly inside ({c.lo}, {c.hi})"
        )
    out = [FlowConstraint(lo=c.lo, hi=points[0])]
    out.extend(FlowConstraint(lo=0.0, hi=b - a) for a, b in zip(points, points[1:] + [c.hi]))
    return out


def split_edges(
    net: ConstrainedNetwork, breakpoints: Dict[int, Sequence[float]]
) -> Tuple[ConstrainedNetwork, EdgeMapping]:
    """Split several edges at once; copies are placed where the edge was.

    Copy k of edge i carries controller-state offset b_k (0 for the first
    copy), so that x_c,ik(0) = x_c,i(0) + b_k.

    Args:
        net: Network to split
        breakpoints: Ascending breakpoints per edge id (missing = no split)

    Returns:
        ``(split network, mapping from the input edges)``
    """
    unknown = [i for i in breakpoints if not 0 <= i < net.graph.m]
    if unknown:
        raise InvalidBreakpointsError(f"breakpoints given for unknown edges {unknown}")

    edges: List[Tuple[int, int]] = []
    intervals: List[FlowConstraint] = []
    source: List[int] = []
    offset: List[float] = []

    for i, (edge, c) in enumerate(zip(net.graph.edges, net.constraints)):
        points = [float(b) for b in breakpoints.get(i, ())]
        parts = split_intervals(c, points)
        for k, part in enumerate(parts):
            edges.append(edge)
            intervals.append(part)
            source.append(i)
            offset.append(0.0 if k == 0 else points[k - 1])

    m = net.graph.m
    mapping = EdgeMapping(
        original_m=m,
        source=tuple(source),
        sign=(1,) * len(source),
        offset=tuple(offset),
        flow_offset=(0.0,) * m,
    )
    split = ConstrainedNetwork(
        graph=DirectedGraph(n=net.graph.n, edges=tuple(edges)),
        constraints=tuple(intervals),
    )
    return split, mapping


def split_edge(
    net: ConstrainedNetwork, edge_id: int, breakpoints: Sequence[float]
) -> Tuple[ConstrainedNetwork, EdgeMapping]:
    """Replace one edge by parallel copies with the split sub-intervals.

    Example:
        Edge [0.3, 1.6] with breakpoint 0.8 becomes [0.3, 0.8] and [0, 0.8].
    """
    if not 0 <= edge_id < net.graph.m:
        raise InvalidBreakpointsError(f"edge {edge_id} does not exist")
    return split_edges(net, {edge_id: breakpoints})
