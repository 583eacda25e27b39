"""Lyapunov functions of the closed loops and the predicted consensus value."""

import logging
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from distnet.constraints.saturation import sat_integral
from distnet.dynamics.models import NetworkState, NetworkSystem
from distnet.graph.matching import check_matching

logger = logging.getLogger(__name__)


def _absorbed_bounds(system: NetworkSystem) -> Optional[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """(lo, hi, xbar_c) of the absorbed network, or None when unmatched."""
    net = system.network
    if not np.any(system.dbar):
        return net.lo, net.hi, np.zeros(system.m)
    result = check_matching(system.terminals, system.dbar, system.graph)
    if not result.matchable:
        return None
    xbar = result.xbar
    return net.lo + xbar, net.hi + xbar, xbar


def lyapunov_sat_series(system: NetworkSystem, x: np.ndarray, xc: np.ndarray) -> np.ndarray:
    """V for a stack of samples (rows of ``x`` and ``xc``) of a constrained system.

    With a nonzero disturbance V is taken on the absorbed network, i.e. with
    shifted bounds and x_c - xbar_c. Returns NaN everywhere when the
    disturbance cannot be matched.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    xc = np.atleast_2d(np.asarray(xc, dtype=float)).reshape(x.shape[0], system.m)
    bounds = _absorbed_bounds(system)
    if bounds is None:
        return np.full(x.shape[0], np.nan)
    lo, hi, xbar = bounds
    B = system.graph.incidence_matrix.astype(float)
    z = -(system.hamiltonian.gradient(x) @ B) - (xc - xbar)
    return np.sum(sat_integral(z, lo, hi), axis=-1) + system.hamiltonian.value(x)


def lyapunov_sat(system: NetworkSystem, state: NetworkState) -> float:
    """V = sum S(-B^T dH(x) - x_c; u-, u+) + H(x).

    Nonincreasing along constrained trajectories. Nonnegative when every
    lower bound is 0 and H >= 0.

    Example:
        ```python
        V = lyapunov_sat(system, NetworkState(x=(1.0, 1.0, 1.0), xc=(0.0, 0.0, 0.0)))
        # 1.5 for the unit-weight quadratic H: S vanishes at z = 0
        ```
    """
    if system.mode != "constrained":
        raise ValueError(f"lyapunov_sat needs a constrained system, got {system.mode}")
    return float(lyapunov_sat_series(system, state.x_array, state.xc_array)[0])


def lyapunov_unconstrained_series(
    system: NetworkSystem, x: np.ndarray, xc: np.ndarray, xbar_c: np.ndarray
) -> np.ndarray:
    """V_d for a stack of samples of an unconstrained system."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    xc = np.atleast_2d(np.asarray(xc, dtype=float)).reshape(x.shape[0], system.m)
    w = system.controller_weight_array
    diff = xc - np.asarray(xbar_c, dtype=float)
    # quadratic H_c: H_c(x_c) - dH_c(xbar)^T (x_c - xbar) - H_c(xbar) = 1/2 w (x_c - xbar)^2
    return system.hamiltonian.value(x) + 0.5 * np.sum(w * diff * diff, axis=-1)


def lyapunov_unconstrained(
    system: NetworkSystem, state: NetworkState, xbar_c: np.ndarray
) -> float:
    """V_d = H(x) + H_c(x_c) - dH_c(xbar_c)^T (x_c - xbar_c) - H_c(xbar_c).

    ``xbar_c`` must satisfy B dH_c(xbar_c) = E d; see ``matching_controller_state``.
    """
    return float(lyapunov_unconstrained_series(system, state.x_array, state.xc_array, xbar_c)[0])


def matching_controller_state(system: NetworkSystem) -> Optional[np.ndarray]:
    """xbar_c with B dH_c(xbar_c) = E d, or None when unmatched.

    For H_c with weights w this is the minimum-norm matching flow divided by w.
    """
    if system.terminals.k == 0 or not np.any(system.dbar):
        return np.zeros(system.m)
    result = check_matching(system.terminals, system.dbar, system.graph)
    if not result.matchable:
        return None
    return result.xbar / system.controller_weight_array


def predict_consensus(system: NetworkSystem, total_storage: float) -> tuple[float, np.ndarray]:
    """Consensus value alpha fixed by the conserved total storage.

    Solves sum_i (dH_i/dx_i)^-1(alpha) = total_storage; the left side is
    strictly increasing in alpha.

    Returns:
        ``(alpha, x_star)`` with dH/dx(x_star) = alpha * 1

    Raises:
        ValueError: If no alpha reaches the total (bounded gradient range)
    """
    n = system.n
    hamiltonian = system.hamiltonian

    def excess(alpha: float) -> float:
        return float(np.sum(hamiltonian.inverse_gradient(alpha, n))) - total_storage

    sup = _gradient_supremum(system)
    cap = np.inf if sup is None else sup * (1.0 - 1e-12)
    width = 1.0
    for _ in range(200):
        lo, hi = max(-width, -cap), min(width, cap)
        if excess(lo) <= 0.0 <= excess(hi):
            break
        width *= 2.0
    else:
        raise ValueError(f"no consensus value reaches total storage {total_storage:g}")
    alpha = brentq(excess, lo, hi, xtol=1e-14)
    logger.debug(f"Predicted consensus value {alpha:.6g} for total storage {total_storage:.6g}")
    return alpha, hamiltonian.inverse_gradient(alpha, n)


def _gradient_supremum(system: NetworkSystem) -> Optional[float]:
    """Smallest sup |dH_i/dx_i| over vertices for bounded gradients, else None."""
    hamiltonian = system.hamiltonian
    if getattr(hamiltonian, "name", None) == "logcosh":
        weights = hamiltonian.weights
        return float(min(weights)) if weights is not None else 1.0
    return None
