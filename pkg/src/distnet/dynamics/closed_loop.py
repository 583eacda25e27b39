"""Right-hand sides of the closed-loop systems.

All three closed loops act on the packed vector ``y = [x, x_c]``:

- constrained:   x' = B sat(-B^T dH - x_c; u-, u+) + E d,   x_c' = B^T dH
- unconstrained: x' = -B R B^T dH - B dH_c(x_c) + E d,      x_c' = B^T dH
- proportional:  x' = -B R B^T dH + E d,                    x_c' = 0
"""

from typing import Callable

import numpy as np

from distnet.constraints.saturation import sat
from distnet.dynamics.models import NetworkState, NetworkSystem


class ClosedLoop:
    """Precomputed closed loop of a NetworkSystem.

    Holds B, E d, the bounds and gains as arrays so repeated right-hand
    side evaluations only do matrix-vector products.
    """

    def __init__(self, system: NetworkSystem):
        self.system = system
        self.n = system.n
        self.m = system.m
        self.B = system.graph.incidence_matrix.astype(float)
        self.Bt = self.B.T.copy()
        self.inflow = system.inflow
        self.gradient = system.hamiltonian.gradient
        self.gain = system.gain_array
        self.weights = system.controller_weight_array
        if system.mode == "constrained":
            self.lo = system.network.lo
            self.hi = system.network.hi

    def split(self, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return y[..., : self.n], y[..., self.n :]

    def flows(self, x: np.ndarray, xc: np.ndarray) -> np.ndarray:
        """Edge flows u for one state or a stack of samples."""
        y = self.gradient(x) @ self.B
        mode = self.system.mode
        if mode == "constrained":
            return sat(-y - xc, self.lo, self.hi)
        if mode == "unconstrained":
            return -self.gain * y - self.weights * xc
        return -self.gain * y

    def rhs(self, y: np.ndarray) -> np.ndarray:
        x, xc = self.split(y)
        g = self.gradient(x)
        Btg = self.Bt @ g
        mode = self.system.mode
        if mode == "constrained":
            u = sat(-Btg - xc, self.lo, self.hi)
        elif mode == "unconstrained":
            u = -self.gain * Btg - self.weights * xc
        else:
            u = -self.gain * Btg
        dx = self.B @ u + self.inflow
        dxc = np.zeros(self.m) if mode == "proportional" else Btg
        return np.concatenate([dx, dxc])


def build_rhs(system: NetworkSystem) -> Callable[[np.ndarray], np.ndarray]:
    """Right-hand side ``f(y)`` of the system's closed loop on packed states."""
    return ClosedLoop(system).rhs


def _derivative(system: NetworkSystem, state: NetworkState) -> NetworkState:
    if len(state.x) != system.n or len(state.xc) != system.m:
        raise ValueError(
            f"state has {len(state.x)} vertices and {len(state.xc)} edges, "
            f"system has {system.n} and {system.m}"
        )
    dy = ClosedLoop(system).rhs(state.pack())
    return NetworkState.from_arrays(dy[: system.n], dy[system.n :])


def rhs_constrained(system: NetworkSystem, state: NetworkState) -> NetworkState:
    """Time derivative of the saturated closed loop.

    Example:
        ```python
        net = ConstrainedNetwork.from_intervals(2, [(0, 1)], [(1.0, 2.0)])
        system = NetworkSystem(graph=net.graph, constraints=net.constraints)
        d = rhs_constrained(system, NetworkState(x=(0.0, 0.0), xc=(0.0,)))
        # d.x == (-1.0, 1.0): the flow is pinned at its lower bound
        ```
    """
    if system.mode != "constrained":
        raise ValueError(f"rhs_constrained needs a constrained system, got {system.mode}")
    return _derivative(system, state)


def rhs_unconstrained(system: NetworkSystem, state: NetworkState) -> NetworkState:
    """Time derivative of the unconstrained PI closed loop."""
    if system.mode != "unconstrained":
        raise ValueError(f"rhs_unconstrained needs an unconstrained system, got {system.mode}")
    return _derivative(system, state)


def rhs_proportional(system: NetworkSystem, state: NetworkState) -> NetworkState:
    """Time derivative under proportional control only."""
    if system.mode != "proportional":
        raise ValueError(f"rhs_proportional needs a proportional system, got {system.mode}")
    return _derivative(system, state)
