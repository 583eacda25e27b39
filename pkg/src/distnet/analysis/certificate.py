"""Search for a consensus certificate on strongly connected networks.

A certificate is a covering set of cycles, breakpoints splitting every edge
that several cycles share, and an assignment of the split copies to the
cycles, such that every cycle of the augmented network has an intersection
of its intervals with non-empty interior.

For a fixed cover and assignment the copy bounds are affine in the
breakpoints, so the largest achievable minimum width is a linear program:

    maximize t  s.t.  low_p(b) + t <= high_q(b)  for all copies p, q on a cycle
"""

import itertools
import logging
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
from scipy.optimize import linprog

from distnet.analysis.models import ConsensusCertificate, CycleIntersection, Inconclusive
from distnet.common.config import AnalysisConfig
from distnet.common.exceptions import (
    IncompatibleOrientationError,
    InvalidBreakpointsError,
    NotBalancedError,
)
from distnet.constraints.models import ConstrainedNetwork
from distnet.cycles.cover import augment, enumerate_covers, minimal_multiplicity
from distnet.cycles.models import CycleCover
from distnet.graph.core import is_strongly_connected

logger = logging.getLogger(__name__)

Affine = Tuple[np.ndarray, float]


def copy_assignments(cover: CycleCover) -> Iterator[Dict[int, Tuple[int, ...]]]:
    """Assignments that differ in which cycle receives the first copy.

    Only the first copy keeps the original lower bound; the other copies
    are [0, width] with freely chosen widths, so permuting them among the
    remaining cycles gives nothing new.
    """
    split = [i for i, t in enumerate(cover.multiplicity) if t > 1]
    choices = []
    for i in split:
        t = cover.multiplicity[i]
        perms = []
        for first in range(t):
            rest = iter(range(1, t))
            perms.append(tuple(0 if r == first else next(rest) for r in range(t)))
        choices.append(perms)
    for combo in itertools.product(*choices):
        yield dict(zip(split, combo))


def _copy_bounds(
    net: ConstrainedNetwork, cover: CycleCover
) -> Tuple[int, Dict[int, List[Tuple[Affine, Affine]]]]:
    """Affine (low, high) of every copy in the breakpoint variables."""
    index: Dict[int, List[int]] = {}
    nvars = 0
    for i, t in enumerate(cover.multiplicity):
        if t > 1:
            index[i] = list(range(nvars, nvars + t - 1))
            nvars += t - 1

    def const(value: float) -> Affine:
        return np.zeros(nvars), float(value)

    def var(k: int) -> Affine:
        coef = np.zeros(nvars)
        coef[k] = 1.0
        return coef, 0.0

    bounds: Dict[int, List[Tuple[Affine, Affine]]] = {}
    for i, c in enumerate(net.constraints):
        t = cover.multiplicity[i]
        if t <= 1:
            bounds[i] = [(const(c.lo), const(c.hi))]
            continue
        ks = index[i]
        copies = [(const(c.lo), var(ks[0]))]
        for r in range(1, t):
            start = var(ks[r - 1])
            if r < t - 1:
                end = var(ks[r])
            else:
                end = const(c.hi)
            width = (end[0] - start[0], end[1] - start[1])
            copies.append((const(0.0), width))
        bounds[i] = copies
    return nvars, bounds


def _cycle_copies(cover: CycleCover, assignment: Dict[int, Tuple[int, ...]]) -> List[List[Tuple[int, int]]]:
    """Per cycle, the (edge, copy) pairs it uses."""
    used = {i: 0 for i in range(len(cover.multiplicity))}
    out = []
    for cycle in cover.cycles:
        members = []
        for e in cycle.edges:
            perm = assignment.get(e, (0,))
            members.append((e, perm[used[e]]))
            used[e] += 1
        out.append(members)
    return out


def max_margin(
    net: ConstrainedNetwork, cover: CycleCover, assignment: Dict[int, Tuple[int, ...]]
) -> Tuple[float, Dict[int, Tuple[float, ...]]]:
    """Largest minimum intersection width over the breakpoints.

    Returns:
        ``(t, breakpoints)``; ``t <= 0`` means no splitting gives every
        cycle an interior for this cover and assignment
    """
    nvars, bounds = _copy_bounds(net, cover)
    rows, rhs = [], []
    for members in _cycle_copies(cover, assignment):
        for (ep, cp), (eq, cq) in itertools.product(members, repeat=2):
            (low_coef, low_const), _ = bounds[ep][cp]
            _, (high_coef, high_const) = bounds[eq][cq]
            rows.append(np.append(low_coef - high_coef, 1.0))
            rhs.append(high_const - low_const)

    if not rows:
        return float("inf"), {}
    A_ub = np.array(rows, dtype=float)
    b_ub = np.array(rhs, dtype=float)
    if nvars == 0:
        return float(np.min(b_ub)), {}

    var_bounds = []
    for i, t in enumerate(cover.multiplicity):
        if t > 1:
            c = net.constraints[i]
            var_bounds.extend([(c.lo, c.hi)] * (t - 1))
    cap = float(max(c.width for c in net.constraints))
    var_bounds.append((None, cap))

    objective = np.zeros(nvars + 1)
    objective[-1] = -1.0
    res = linprog(c=objective, A_ub=A_ub, b_ub=b_ub, bounds=var_bounds, method="highs")
    if res.status != 0:
        logger.debug(f"LP failed for assignment {assignment}: {res.message}")
        return float("-inf"), {}

    solution = res.x
    points: Dict[int, Tuple[float, ...]] = {}
    k = 0
    for i, t in enumerate(cover.multiplicity):
        if t > 1:
            points[i] = tuple(float(v) for v in solution[k : k + t - 1])
            k += t - 1
    return float(solution[-1]), points


def cycle_intersections(
    net: ConstrainedNetwork,
    cover: CycleCover,
    breakpoints: Dict[int, Tuple[float, ...]],
    assignment: Dict[int, Tuple[int, ...]],
) -> Tuple[CycleIntersection, ...]:
    """Intersections of the assigned sub-intervals, recomputed from the raw intervals."""
    augmented = augment(net, cover, breakpoints, assignment)
    out = []
    for base, cycle in zip(cover.cycles, augmented.cover.cycles):
        parts = [augmented.network.constraints[e] for e in cycle.edges]
        out.append(
            CycleIntersection(
                cycle=base.edges,
                copies=cycle.edges,
                lower=max(c.lo for c in parts),
                upper=min(c.hi for c in parts),
            )
        )
    return tuple(out)


def verify_certificate(
    net: ConstrainedNetwork, certificate: ConsensusCertificate, interior_tol: float = 1e-9
) -> bool:
    """Independently re-check a certificate against the raw intervals.

    Re-augments the network, recomputes every cycle's intersection and
    requires width >= ``interior_tol`` and agreement with the recorded values.
    """
    try:
        recomputed = cycle_intersections(
            net, certificate.cover, certificate.breakpoints, certificate.assignment
        )
    except (InvalidBreakpointsError, NotBalancedError, ValueError) as e:
        logger.warning(f"Certificate does not re-augment: {e}")
        return False
    if len(recomputed) != len(certificate.intersections):
        return False
    for fresh, recorded in zip(recomputed, certificate.intersections):
        if fresh.width < interior_tol:
            return False
        if abs(fresh.lower - recorded.lower) > 1e-12 or abs(fresh.upper - recorded.upper) > 1e-12:
            return False
    return True


def certify_consensus(
    net: ConstrainedNetwork, config: Optional[AnalysisConfig] = None
) -> Union[ConsensusCertificate, Inconclusive]:
    """Search for a splitting that proves convergence to consensus.

    Covers of the minimal multiplicity vector are tried in order (greedy
    decomposition first), and for each cover every copy assignment up to
    ``max_assignments``. The first verified candidate wins.

    Args:
        net: Network with compatible orientation
        config: Tolerances and search bounds

    Returns:
        ConsensusCertificate, or Inconclusive (never a claim of instability)

    Raises:
        IncompatibleOrientationError: If some interval has u+ <= 0 or u- < 0

    Example:
        ```python
        result = certify_consensus(net)
        if isinstance(result, ConsensusCertificate):
            print(result.breakpoints, result.margin)
        ```
    """
    config = config or AnalysisConfig()
    if not net.is_compatible:
        raise IncompatibleOrientationError("certificate search needs u+ > 0 and u- >= 0 everywhere")
    if not is_strongly_connected(net.graph):
        return Inconclusive(
            reason="not_strongly_connected",
            message="no covering set of cycles exists on a graph that is not strongly connected",
        )

    multiplicity = minimal_multiplicity(net.graph)
    covers_tried = assignments_tried = 0
    best = float("-inf")
    hit_limit = False

    for cover in enumerate_covers(net.graph, multiplicity, limit=config.max_alternative_covers):
        covers_tried += 1
        for assignment in copy_assignments(cover):
            if assignments_tried >= config.max_assignments:
                hit_limit = True
                break
            assignments_tried += 1
            margin, points = max_margin(net, cover, assignment)
            best = max(best, margin)
            logger.debug(f"Cover {covers_tried}, assignment {assignment}: margin {margin:.6g}")
            if margin < config.interior_tol:
                continue

            try:
                intersections = cycle_intersections(net, cover, points, assignment)
            except (InvalidBreakpointsError, ValueError) as e:
                logger.debug(f"Breakpoints {points} rejected: {e}")
                continue
            certificate = ConsensusCertificate(
                cover=cover,
                breakpoints=points,
                assignment={i: p for i, p in assignment.items()},
                intersections=intersections,
                covers_tried=covers_tried,
                assignments_tried=assignments_tried,
            )
            if verify_certificate(net, certificate, config.interior_tol):
                logger.info(
                    f"Consensus certificate found: {len(cover.cycles)} cycles, "
                    f"margin {certificate.margin:.6g}"
                )
                return certificate
            logger.debug(f"Candidate with margin {margin:.3e} failed verification")
        if hit_limit:
            break

    reason = "search_limit" if hit_limit else "no_feasible_splitting"
    logger.info(
        f"No consensus certificate ({reason}) after {covers_tried} covers and "
        f"{assignments_tried} assignments, best margin {best:.6g}"
    )
    return Inconclusive(
        reason=reason,
        message=(
            "no splitting of the shared edges gives every covering cycle an interior "
            f"intersection (best minimum width {best:.6g})"
        ),
        covers_tried=covers_tried,
        assignments_tried=assignments_tried,
        best_margin=best if np.isfinite(best) else None,
    )
