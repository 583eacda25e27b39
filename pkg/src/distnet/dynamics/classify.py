"""Classify a simulated trajectory as consensus, clustering or divergence."""

import logging
from typing import List, Optional

import numpy as np

from distnet.common.config import ClassificationConfig
from distnet.dynamics.models import Trajectory, TrajectoryClass

logger = logging.getLogger(__name__)


def cluster_values(values: np.ndarray, tol: float) -> List[float]:
    """Group sorted values whose neighbours differ by less than ``tol``; return group means."""
    ordered = np.sort(np.asarray(values, dtype=float))
    if ordered.size == 0:
        return []
    groups = [[ordered[0]]]
    for v in ordered[1:]:
        if v - groups[-1][-1] < tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    return [float(np.mean(g)) for g in groups]


def _growth_rate(times: np.ndarray, norms: np.ndarray) -> float:
    """Slope of a least-squares line through ||x|| over the trailing half."""
    half = times >= times[-1] / 2.0
    if np.count_nonzero(half) < 2:
        return 0.0
    slope, _ = np.polyfit(times[half], norms[half], 1)
    return float(slope)


def _sign_constant(rates: np.ndarray, tol: float) -> bool:
    """Every column keeps one sign wherever its magnitude exceeds ``tol``."""
    for column in rates.T:
        active = column[np.abs(column) > tol]
        if active.size and not (np.all(active > 0) or np.all(active < 0)):
            return False
    return True


def _flows_pinned(u_window: np.ndarray, tol: float) -> bool:
    """Every flow stays within ``tol`` of its final value over the window."""
    if u_window.size == 0:
        return True
    return bool(np.max(np.abs(u_window - u_window[-1])) < tol)


def classify_trajectory(
    traj: Trajectory, config: Optional[ClassificationConfig] = None
) -> TrajectoryClass:
    """Classify the long-time behaviour of ``traj``.

    Checked in order:

    1. Divergent: ||x(T)|| beyond ``divergence_factor * (1 + ||x(0)||)`` or a
       fitted growth rate of ||x|| over the trailing half above
       ``divergence_rate_tol``.
    2. Consensus: spread of dH/dx(x(T)) below ``consensus_tol`` and x no
       longer moving.
    3. Clustering: dH/dx and the flows stationary over the trailing window,
       spread at least ``consensus_tol`` and not shrinking by more than
       ``spread_shrink_rtol`` across the window, x_c' sign-constant per edge.
       A slowly contracting spread is a consensus not yet reached.
    4. Undecided otherwise.

    Args:
        traj: Recorded trajectory (needs at least two samples)
        config: Thresholds (defaults to ClassificationConfig())

    Returns:
        TrajectoryClass with alpha for consensus and cluster values for clustering
    """
    config = config or ClassificationConfig()
    if len(traj) < 2:
        return TrajectoryClass(kind="undecided", spread=float("nan"), message="too few samples")

    times = traj.times
    norms = np.linalg.norm(traj.x, axis=1)
    grad_final = traj.grad[-1]
    spread = float(np.ptp(grad_final)) if grad_final.size else 0.0
    rate = _growth_rate(times, norms)

    if norms[-1] > config.divergence_factor * (1.0 + norms[0]) or rate > config.divergence_rate_tol:
        logger.info(f"Trajectory diverges: ||x(T)|| = {norms[-1]:.4g}, growth rate {rate:.4g}")
        return TrajectoryClass(kind="divergent", spread=spread, growth_rate=rate)

    dt = times[-1] - times[-2]
    speed = float(np.max(np.abs(traj.x[-1] - traj.x[-2]))) / dt if traj.n else 0.0
    if spread < config.consensus_tol and speed < config.consensus_tol:
        alpha = float(np.mean(grad_final)) if grad_final.size else 0.0
        logger.info(f"Trajectory reaches consensus at alpha = {alpha:.6g}")
        return TrajectoryClass(kind="consensus", spread=spread, growth_rate=rate, alpha=alpha)

    message = "no criterion met within the horizon"
    window = times >= times[-1] * (1.0 - config.trailing_fraction)
    if np.count_nonzero(window) >= 2:
        drift = float(np.max(np.abs(traj.grad[window] - grad_final)))
        pinned = _flows_pinned(traj.u[window], config.stabilization_tol)
        shrink = float(np.ptp(traj.grad[window][0])) - spread if grad_final.size else 0.0
        xc_window = traj.xc[window]
        rates = np.diff(xc_window, axis=0) / np.diff(times[window])[:, None]
        if shrink > config.spread_shrink_rtol * spread:
            message = f"spread still shrinking by {shrink:.3e} over the trailing window"
        elif (
            drift < config.stabilization_tol
            and pinned
            and _sign_constant(rates, config.consensus_tol)
        ):
            clusters = cluster_values(grad_final, config.consensus_tol)
            logger.info(f"Trajectory forms {len(clusters)} clusters: {clusters}")
            return TrajectoryClass(
                kind="clustering",
                spread=spread,
                growth_rate=rate,
                clusters=tuple(clusters),
            )

    logger.warning(f"Trajectory undecided: spread {spread:.3e}, growth rate {rate:.3e}")
    return TrajectoryClass(
        kind="undecided",
        spread=spread,
        growth_rate=rate,
        message=message,
    )
