"""Fixed-step Runge-Kutta integration of the closed loops."""

import logging
from typing import List, Optional

import numpy as np

from distnet.common.config import ClassificationConfig, SimulationConfig
from distnet.common.exceptions import ConservationError, IntegrationError
from distnet.common.retry import with_step_halving
from distnet.dynamics.classify import classify_trajectory
from distnet.dynamics.closed_loop import ClosedLoop
from distnet.dynamics.lyapunov import (
    lyapunov_sat_series,
    lyapunov_unconstrained_series,
    matching_controller_state,
    predict_consensus,
)
from distnet.dynamics.models import (
    NetworkState,
    NetworkSystem,
    SimulateSpec,
    SimulationResult,
    Trajectory,
)

logger = logging.getLogger(__name__)


def _lyapunov(system: NetworkSystem, x: np.ndarray, xc: np.ndarray) -> np.ndarray:
    if system.mode == "constrained":
        return lyapunov_sat_series(system, x, xc)
    if system.mode == "unconstrained":
        xbar = matching_controller_state(system)
        if xbar is None:
            return np.full(x.shape[0], np.nan)
        return lyapunov_unconstrained_series(system, x, xc, xbar)
    return np.asarray(system.hamiltonian.value(x), dtype=float).reshape(x.shape[0])


def build_trajectory(
    system: NetworkSystem,
    times: List[float],
    samples: List[np.ndarray],
    step: float,
    complete: bool = True,
    seed: Optional[int] = None,
) -> Trajectory:
    """Assemble a Trajectory with flows and diagnostics from packed samples."""
    loop = ClosedLoop(system)
    y = np.array(samples, dtype=float).reshape(len(samples), system.n + system.m)
    x, xc = y[:, : system.n], y[:, system.n :]
    with np.errstate(over="ignore", invalid="ignore"):
        u = loop.flows(x, xc)
        grad = np.asarray(system.hamiltonian.gradient(x), dtype=float).reshape(x.shape)
        V = _lyapunov(system, x, xc)
    return Trajectory(
        times=np.array(times, dtype=float),
        x=x,
        xc=xc,
        u=np.asarray(u, dtype=float).reshape(len(samples), system.m),
        grad=grad,
        V=V,
        sum_x=x.sum(axis=1),
        step=step,
        mode=system.mode,
        seed=seed,
        complete=complete,
    )


def conservation_residual(traj: Trajectory, total_inflow: float) -> float:
    """max over samples of |1^T x(t) - 1^T x(0) - t 1^T E d| / (1 + t)."""
    expected = traj.sum_x[0] + traj.times * total_inflow
    return float(np.max(np.abs(traj.sum_x - expected) / (1.0 + traj.times)))


def _rk4(
    system: NetworkSystem,
    y0: np.ndarray,
    horizon: float,
    step: float,
    record_every: int,
    seed: Optional[int],
) -> Trajectory:
    """Classical RK4 with ``ceil(horizon / step)`` equal steps ending exactly at T."""
    f = ClosedLoop(system).rhs
    nsteps = max(1, int(np.ceil(horizon / step - 1e-9)))
    h = horizon / nsteps
    y = np.array(y0, dtype=float)
    times, samples = [0.0], [y.copy()]

    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, nsteps + 1):
            k1 = f(y)
            k2 = f(y + 0.5 * h * k1)
            k3 = f(y + 0.5 * h * k2)
            k4 = f(y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if k % record_every == 0 or k == nsteps:
                if not np.all(np.isfinite(y)):
                    partial = build_trajectory(system, times, samples, h, complete=False, seed=seed)
                    raise IntegrationError(
                        f"state became non-finite at t = {k * h:.6g}", partial=partial
                    )
                times.append(k * h)
                samples.append(y.copy())

    return build_trajectory(system, times, samples, h, seed=seed)


def simulate(
    system: NetworkSystem,
    state0: NetworkState,
    horizon: float,
    config: Optional[SimulationConfig] = None,
    seed: Optional[int] = None,
) -> Trajectory:
    """Integrate the system's closed loop from ``state0`` up to ``horizon``.

    The step starts at ``config.step`` and is halved whenever the total
    storage drifts from 1^T x(0) + t 1^T E d by more than
    ``conservation_tol * (1 + t)``.

    Args:
        system: Network, storage function and controller mode
        state0: Initial storage and controller state
        horizon: Final time T > 0
        config: Step control settings (defaults to SimulationConfig())
        seed: Seed that produced ``state0``, recorded on the trajectory

    Returns:
        Trajectory sampled every ``record_every`` steps, plus the final time

    Raises:
        ValueError: If ``horizon <= 0`` or the state has the wrong size
        IntegrationError: On step-size underflow or a non-finite state;
            ``partial`` holds what was recorded

    Example:
        ```python
        net = ConstrainedNetwork.from_intervals(
            3, [(0, 1), (1, 2), (2, 0)], [(1, 2.5), (2, 3), (0, 3)]
        )
        system = NetworkSystem(graph=net.graph, constraints=net.constraints)
        traj = simulate(system, NetworkState.random(3, 3, seed=7), horizon=200)
        ```
    """
    config = config or SimulationConfig()
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if len(state0.x) != system.n or len(state0.xc) != system.m:
        raise ValueError(
            f"initial state has {len(state0.x)} vertices and {len(state0.xc)} edges, "
            f"system has {system.n} and {system.m}"
        )

    total_inflow = float(system.inflow.sum())
    y0 = state0.pack()
    last: Optional[Trajectory] = None
    step = config.step

    try:
        for attempt in with_step_halving(config.max_step_halvings):
            with attempt:
                halvings = attempt.retry_state.attempt_number - 1
                step = config.step / 2**halvings
                if step < config.min_step:
                    raise IntegrationError(
                        f"step size underflow: {step:.3e} < min_step {config.min_step:.3e}",
                        partial=last,
                    )
                if halvings:
                    logger.debug(f"Retrying integration with step {step:.3e}")
                last = _rk4(system, y0, horizon, step, config.record_every, seed)
                residual = conservation_residual(last, total_inflow)
                if residual > config.conservation_tol:
                    raise ConservationError(
                        f"total storage drifted by {residual:.3e} (step {step:.3e})",
                        residual=residual,
                    )
    except ConservationError as e:
        raise IntegrationError(
            f"conservation check failed after {config.max_step_halvings} halvings: {e}",
            partial=last,
        ) from e

    logger.debug(f"Integrated {len(last)} samples up to T = {horizon:g} with step {step:.3e}")
    return last


class Simulator:
    """High-level simulation runner.

    Resolves the initial state, integrates, classifies and reports the
    outcome as a SimulationResult instead of raising.
    """

    def __init__(
        self,
        config: Optional[SimulationConfig] = None,
        classification: Optional[ClassificationConfig] = None,
    ):
        """Initialize simulator.

        Args:
            config: Step control settings
            classification: Thresholds for classify_trajectory
        """
        self.config = config or SimulationConfig()
        self.classification = classification or ClassificationConfig()

    def run(self, system: NetworkSystem, spec: SimulateSpec) -> SimulationResult:
        """Simulate ``system`` according to ``spec``.

        Args:
            system: System to simulate
            spec: Horizon and initial condition (explicit or seeded)

        Returns:
            SimulationResult; status 'failed' carries the error and any partial trajectory

        Example:
            ```python
            simulator = Simulator(SimulationConfig(step=1e-2))
            result = simulator.run(system, SimulateSpec(horizon=200, seed=42))
            if result.status == 'success':
                print(result.classification.kind, result.predicted_alpha)
            ```
        """
        seed = spec.seed if spec.initial_state is None else None
        if spec.initial_state is None and seed is None:
            seed = 0
        state0 = spec.resolve_state(system)

        try:
            traj = simulate(system, state0, spec.horizon, self.config, seed=seed)
        except IntegrationError as e:
            logger.error(f"Simulation failed: {e}")
            return SimulationResult(status="failed", trajectory=e.partial, seed=seed, error=str(e))

        classification = classify_trajectory(traj, self.classification)
        total_inflow = float(system.inflow.sum())
        predicted = None
        if abs(total_inflow) <= 1e-12:
            try:
                predicted, _ = predict_consensus(system, float(traj.sum_x[0]))
            except ValueError as e:
                logger.warning(f"No predicted consensus value: {e}")

        result = SimulationResult(
            status="success",
            trajectory=traj,
            classification=classification,
            predicted_alpha=predicted,
            final_V=float(traj.V[-1]),
            conservation_residual=conservation_residual(traj, total_inflow),
            seed=seed,
        )
        logger.info(
            f"Simulated {system.n} vertices / {system.m} edges up to T = {spec.horizon:g}: "
            f"{classification.kind}"
        )
        return result
