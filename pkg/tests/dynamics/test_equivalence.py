"""Tests that network rewrites preserve the storage dynamics, and unconstrained convergence."""

import numpy as np
import pytest
from scipy.linalg import expm

from distnet.common.config import SimulationConfig
from distnet.constraints import absorb_disturbance, absorption_mapping, normalize_orientation
from distnet.cycles import augment, minimal_cover
from distnet.dynamics import NetworkState, NetworkSystem, simulate
from distnet.graph import DirectedGraph, TerminalPattern, is_strongly_connected, is_weakly_connected
from tests.conftest import (
    SHARED_EDGE,
    load_fixture,
    make_network,
    make_system,
    random_strongly_connected,
    random_weakly_connected,
)


def run_pair(system, state, rewritten, xc_rewritten, horizon, config):
    """Simulate a system and its rewrite from corresponding initial states."""
    original = simulate(system, state, horizon, config)
    mapped = simulate(rewritten, NetworkState.from_arrays(np.array(state.x), xc_rewritten), horizon, config)
    return original, mapped


class TestAbsorption:
    """Test that a matched disturbance can be folded into the intervals."""

    def test_storage_trajectories_agree(self, fast_config):
        """Test x(t) of the disturbed network equals x(t) of the shifted one."""
        spec = load_fixture("triangle_disturbance")
        system = spec.to_system()
        net = system.network
        absorbed, xbar = absorb_disturbance(net, system.terminals, np.array(system.disturbance))
        rewritten = system.with_network(absorbed, terminals=TerminalPattern(), disturbance=())
        state = NetworkState.random(3, 3, seed=spec.seed)
        mapping = absorption_mapping(xbar)

        a, b = run_pair(system, state, rewritten, mapping.map_state(state.xc_array), 50.0, fast_config)
        np.testing.assert_allclose(a.x, b.x, atol=1e-8)
        np.testing.assert_allclose(a.u, mapping.map_flows_back(b.u), atol=1e-8)


class TestOrientation:
    """Test reversal and splitting of edges with non-positive lower bounds."""

    @pytest.mark.parametrize("name", ["bidirectional_edge", "reversed_edge"])
    def test_storage_trajectories_agree(self, name, fast_config):
        """Test x(t) is unchanged by orientation normalization."""
        spec = load_fixture(name)
        system = spec.to_system()
        normalized, mapping = normalize_orientation(system.network)
        assert normalized.is_compatible
        state = NetworkState.random(system.n, system.m, seed=spec.seed)

        a, b = run_pair(
            system, state, system.with_network(normalized), mapping.map_state(state.xc_array), 30.0, fast_config
        )
        np.testing.assert_allclose(a.x, b.x, atol=1e-8)
        np.testing.assert_allclose(a.u, mapping.map_flows_back(b.u), atol=1e-8)


class TestAugmentation:
    """Test that splitting shared edges keeps x(t)."""

    def _compare(self, net, breakpoints, seed, config):
        cover = minimal_cover(net.graph)
        augmented = augment(net, cover, breakpoints)
        system = make_system(net)
        state = NetworkState.random(net.graph.n, net.graph.m, seed=seed)
        a, b = run_pair(
            system,
            state,
            system.with_network(augmented.network),
            augmented.mapping.map_state(state.xc_array),
            50.0,
            config,
        )
        np.testing.assert_allclose(a.x, b.x, atol=1e-6)
        np.testing.assert_allclose(a.u, augmented.mapping.map_flows_back(b.u), atol=1e-6)

    def test_widened_network(self, shared_edge_widened, fast_config):
        """Test the shared edge split at 0.95."""
        self._compare(shared_edge_widened, {2: [0.95]}, seed=6, config=fast_config)

    @pytest.mark.parametrize("draw", range(5))
    def test_random_breakpoints(self, draw, fast_config):
        """Test random intervals and a random breakpoint on the shared edge."""
        rng = np.random.default_rng(100 + draw)
        lo = rng.uniform(0, 0.5, size=5)
        hi = lo + rng.uniform(0.5, 1.5, size=5)
        net = make_network(4, SHARED_EDGE, list(zip(lo, hi)))
        b = float(rng.uniform(lo[2] + 0.05, hi[2] - 0.05))
        self._compare(net, {2: [b]}, seed=draw, config=fast_config)


def unconstrained_system(graph: DirectedGraph, inflow: float = 0.0) -> NetworkSystem:
    """R = I, W = I with a matched in/outflow pair at vertices 0 and 1."""
    if inflow:
        return NetworkSystem(
            graph=graph,
            mode="unconstrained",
            terminals=TerminalPattern(columns=((0, 1), (1, -1))),
            disturbance=(inflow, inflow),
        )
    return NetworkSystem(graph=graph, mode="unconstrained")


class TestUnconstrainedConvergence:
    """Test consensus of the unconstrained PI loop with matched disturbance."""

    def test_line_closed_form(self, fast_config):
        """Test the two-vertex loop against the matrix exponential."""
        spec = load_fixture("unconstrained_line")
        system = spec.to_system()
        state = spec.initial_state
        traj = simulate(system, state, 5.0, fast_config)

        # delta = x_1 - x_0 and x_c obey a linear system with matrix A
        A = np.array([[-2.0, -2.0], [1.0, 0.0]])
        delta0 = state.x[1] - state.x[0]
        delta, _ = expm(5.0 * A) @ np.array([delta0, state.xc[0]])
        mean = float(np.mean(state.x))
        np.testing.assert_allclose(traj.x[-1], [mean - delta / 2, mean + delta / 2], atol=1e-7)

    def test_line_reaches_mean(self, fast_config):
        """Test that the two-vertex loop settles at the mean storage."""
        spec = load_fixture("unconstrained_line")
        traj = simulate(spec.to_system(), spec.initial_state, 40.0, fast_config)
        np.testing.assert_allclose(traj.x[-1], 2.0, atol=1e-6)

    @pytest.mark.slow
    def test_random_strongly_connected(self, rng, fast_config):
        """Test that every random strongly connected graph reaches consensus."""
        for trial in range(25):
            graph = random_strongly_connected(rng, n=int(rng.integers(3, 7)), extra=int(rng.integers(0, 4)))
            system = unconstrained_system(graph, inflow=float(rng.uniform(0.2, 1.0)))
            state = NetworkState.random(graph.n, graph.m, seed=trial, scale=3.0)
            traj = simulate(system, state, 100.0, fast_config)
            assert float(np.ptp(traj.grad[-1])) < 1e-3
            # the matched in/outflow leaves the total untouched
            assert traj.sum_x[-1] == pytest.approx(traj.sum_x[0], abs=1e-8)

    @pytest.mark.slow
    def test_random_weakly_connected(self, rng, fast_config):
        """Test consensus on random oriented trees and other weakly connected graphs."""
        for trial in range(25):
            n = int(rng.integers(3, 7))
            extra = 0 if trial % 2 == 0 else int(rng.integers(1, 4))
            graph = random_weakly_connected(rng, n=n, extra=extra)
            assert is_weakly_connected(graph)
            if extra == 0:
                assert not is_strongly_connected(graph)
            system = unconstrained_system(graph, inflow=float(rng.uniform(0.2, 1.0)))
            state = NetworkState.random(graph.n, graph.m, seed=100 + trial, scale=3.0)
            traj = simulate(system, state, 100.0, fast_config)
            assert float(np.ptp(traj.grad[-1])) < 1e-3
            assert traj.sum_x[-1] == pytest.approx(traj.sum_x[0], abs=1e-8)

    @pytest.mark.slow
    def test_one_consensus_per_component(self, rng, fast_config):
        """Test that disjoint strongly connected components settle separately."""
        for trial in range(10):
            k = int(rng.integers(3, 5))
            first = [(v, (v + 1) % k) for v in range(k)]
            second = [(k + v, k + (v + 1) % k) for v in range(k)]
            graph = DirectedGraph(n=2 * k, edges=tuple(first + second))
            x0 = np.concatenate([3.0 + rng.uniform(-1, 1, k), -3.0 + rng.uniform(-1, 1, k)])
            state = NetworkState.from_arrays(x0, np.zeros(graph.m))
            traj = simulate(unconstrained_system(graph), state, 100.0, fast_config)
            final = traj.x[-1]
            assert float(np.ptp(final[:k])) < 1e-3
            assert float(np.ptp(final[k:])) < 1e-3
            assert final[:k].mean() == pytest.approx(x0[:k].mean(), abs=1e-6)
            assert final[k:].mean() == pytest.approx(x0[k:].mean(), abs=1e-6)

    def test_proportional_consensus(self, fast_config):
        """Test that the proportional loop equalizes storage without disturbance."""
        graph = DirectedGraph(n=4, edges=SHARED_EDGE)
        system = NetworkSystem(graph=graph, mode="proportional")
        state = NetworkState.from_arrays(np.array([2.0, -1.0, 0.5, 3.0]), np.zeros(5))
        traj = simulate(system, state, 40.0, fast_config)
        np.testing.assert_allclose(traj.x[-1], 1.125, atol=1e-6)
        assert np.all(np.diff(traj.V) <= 1e-12)
