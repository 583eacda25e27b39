"""Exact verdict for a network that is a single directed cycle."""

import logging
from typing import Sequence, Union

from distnet.analysis.models import CycleVerdict
from distnet.common.exceptions import IncompatibleOrientationError
from distnet.constraints.models import ConstrainedNetwork
from distnet.cycles.models import DirectedCycle

logger = logging.getLogger(__name__)


def analyze_cycle(
    net: ConstrainedNetwork,
    cycle: Union[DirectedCycle, Sequence[int]],
    interior_tol: float = 1e-9,
) -> CycleVerdict:
    """Classify a cycle by the intersection of its flow intervals.

    With L = max u- and U = min u+ over the cycle:

    - U - L > tol: consensus
    - |U - L| <= tol: clustering (a warning is logged unless U == L)
    - U - L < -tol: unstable

    Args:
        net: Network holding the cycle
        cycle: A DirectedCycle, or an unordered collection of edge ids
        interior_tol: Width separating an interior from a single point

    Returns:
        CycleVerdict with the witness interval [L, U]

    Raises:
        NotACycleError: If the edges do not form one directed cycle
        IncompatibleOrientationError: If some interval has u+ <= 0 or u- < 0

    Example:
        ```python
        net = ConstrainedNetwork.from_intervals(
            3, [(0, 1), (1, 2), (2, 0)], [(1, 2), (2, 3), (0, 3)]
        )
        analyze_cycle(net, [0, 1, 2]).classification  # 'clustering'
        ```
    """
    if isinstance(cycle, DirectedCycle):
        cycle = cycle.check_on(net.graph)
    else:
        cycle = DirectedCycle.from_edges(net.graph, cycle)

    bad = [e for e in cycle.edges if not net.constraints[e].is_compatible]
    if bad:
        raise IncompatibleOrientationError(
            f"edges {bad} need u+ > 0 and u- >= 0; normalize the orientation first"
        )

    lower = max(net.constraints[e].lo for e in cycle.edges)
    upper = min(net.constraints[e].hi for e in cycle.edges)
    width = upper - lower

    boundary = False
    if width > interior_tol:
        classification = "consensus"
    elif width >= -interior_tol:
        classification = "clustering"
        boundary = width != 0.0
        if boundary:
            logger.warning(
                f"Cycle {cycle.edges}: intersection width {width:.3e} is within the "
                f"interior tolerance {interior_tol:.1e}; treated as a single point"
            )
    else:
        classification = "unstable"

    logger.info(f"Cycle {cycle.edges}: intersection [{lower:g}, {upper:g}] -> {classification}")
    return CycleVerdict(
        classification=classification,
        cycle=cycle.edges,
        lower=lower,
        upper=upper,
        boundary=boundary,
    )
