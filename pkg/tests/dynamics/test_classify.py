"""Tests for trajectory classification, including agreement with the exact cycle verdicts."""

import numpy as np
import pytest

from distnet.analysis import analyze_cycle
from distnet.common.config import ClassificationConfig
from distnet.dynamics import (
    NetworkState,
    SimulateSpec,
    Simulator,
    Trajectory,
    classify_trajectory,
    cluster_values,
    simulate,
)
from tests.conftest import TRIANGLE, load_fixture, make_network, make_system


def synthetic(times: np.ndarray, x: np.ndarray, xc: np.ndarray) -> Trajectory:
    """Trajectory of identity-quadratic storage from raw samples."""
    count = times.size
    return Trajectory(
        times=times,
        x=x,
        xc=xc,
        u=np.zeros_like(xc),
        grad=x.copy(),
        V=np.zeros(count),
        sum_x=x.sum(axis=1),
        step=float(times[1] - times[0]),
    )


class TestClusterValues:
    """Test grouping of gradient values."""

    def test_groups(self):
        """Test that close values merge into their mean."""
        assert cluster_values(np.array([3.0, 1.0, 1.0005]), 1e-3) == pytest.approx([1.00025, 3.0])

    def test_empty(self):
        """Test that no values give no clusters."""
        assert cluster_values(np.array([]), 1e-3) == []


class TestClassifySynthetic:
    """Test the classification rules on hand-made trajectories."""

    def test_consensus(self):
        """Test a trajectory resting at equal gradients."""
        times = np.linspace(0, 10, 11)
        x = np.tile([0.5, 0.5, 0.5], (11, 1))
        result = classify_trajectory(synthetic(times, x, np.zeros((11, 3))))
        assert result.kind == "consensus"
        assert result.alpha == pytest.approx(0.5)

    def test_divergent_by_growth(self):
        """Test linear growth of the storage norm."""
        times = np.linspace(0, 100, 101)
        x = np.column_stack([times, -times])
        result = classify_trajectory(synthetic(times, x, np.zeros((101, 1))))
        assert result.kind == "divergent"
        assert result.growth_rate == pytest.approx(np.sqrt(2.0))

    def test_divergent_by_magnitude(self):
        """Test that a huge final norm is divergent regardless of the fit."""
        times = np.linspace(0, 10, 11)
        x = np.zeros((11, 2))
        x[-1] = [1e5, -1e5]
        result = classify_trajectory(synthetic(times, x, np.zeros((11, 1))))
        assert result.kind == "divergent"

    def test_clustering(self):
        """Test stationary unequal gradients with monotone controller states."""
        times = np.linspace(0, 100, 101)
        x = np.tile([1.0, -2.0, 1.0], (101, 1))
        xc = np.column_stack([-3 * times, 3 * times, np.zeros(101)])
        result = classify_trajectory(synthetic(times, x, xc))
        assert result.kind == "clustering"
        assert result.clusters == pytest.approx((-2.0, 1.0))
        assert result.spread == pytest.approx(3.0)

    def test_shrinking_spread_is_not_clustering(self):
        """Test that a slowly contracting spread is left undecided rather than called clustering."""
        times = np.linspace(0, 100, 101)
        a = 0.01 * np.exp(-0.005 * times)
        x = np.column_stack([a, -a])
        result = classify_trajectory(synthetic(times, x, np.zeros((101, 1))))
        assert result.kind == "undecided"
        assert "shrinking" in result.message

    def test_moving_flows_are_not_clustering(self):
        """Test that stationary gradients with drifting flows are not clustering."""
        times = np.linspace(0, 100, 101)
        x = np.tile([1.0, -2.0, 1.0], (101, 1))
        traj = synthetic(times, x, np.zeros((101, 3)))
        traj = traj.model_copy(update={"u": np.column_stack([np.sin(times)] * 3)})
        assert classify_trajectory(traj).kind == "undecided"

    def test_undecided_when_oscillating(self):
        """Test that a still-moving bounded trajectory is undecided."""
        times = np.linspace(0, 100, 1001)
        x = np.column_stack([np.sin(times), -np.sin(times)])
        result = classify_trajectory(synthetic(times, x, np.zeros((1001, 1))))
        assert result.kind == "undecided"
        assert result.message

    def test_too_few_samples(self):
        """Test that a single sample cannot be classified."""
        traj = Trajectory(
            times=np.array([0.0]),
            x=np.zeros((1, 2)),
            xc=np.zeros((1, 1)),
            u=np.zeros((1, 1)),
            grad=np.zeros((1, 2)),
            V=np.zeros(1),
            sum_x=np.zeros(1),
            step=0.1,
        )
        assert classify_trajectory(traj).kind == "undecided"

    def test_custom_tolerance(self):
        """Test that a looser tolerance turns a small spread into consensus."""
        times = np.linspace(0, 10, 11)
        x = np.tile([0.5, 0.505], (11, 1))
        loose = ClassificationConfig(consensus_tol=1e-1)
        assert classify_trajectory(synthetic(times, x, np.zeros((11, 1))), loose).kind == "consensus"
        assert classify_trajectory(synthetic(times, x, np.zeros((11, 1)))).kind != "consensus"


class TestTriangleTrichotomy:
    """Test that simulation agrees with the exact verdict on the three triangle configurations."""

    def test_consensus_case(self, fast_config):
        """Test that intervals meeting in [2, 2.5] reach consensus."""
        spec = load_fixture("triangle_consensus")
        system = spec.to_system()
        assert analyze_cycle(system.network, [0, 1, 2]).classification == "consensus"
        traj = simulate(system, NetworkState.random(3, 3, seed=11), 200.0, fast_config)
        result = classify_trajectory(traj)
        assert result.kind == "consensus"
        assert result.alpha == pytest.approx(traj.x[0].mean(), abs=1e-3)

    def test_clustering_case(self, fast_config):
        """Test that intervals meeting in the single point 2 form two clusters."""
        spec = load_fixture("triangle_clustering")
        system = spec.to_system()
        assert analyze_cycle(system.network, [0, 1, 2]).classification == "clustering"
        traj = simulate(system, spec.initial_state, 200.0, fast_config)
        result = classify_trajectory(traj)
        assert result.kind == "clustering"
        assert len(result.clusters) == 2
        # vertex 1 only loses storage; vertices 0 and 2 share the upper cluster
        assert traj.x[-1, 1] <= traj.x[0, 1]
        assert traj.x[-1, 0] == pytest.approx(traj.x[-1, 2], abs=1e-3)
        np.testing.assert_allclose(traj.u[-1], 2.0, atol=1e-6)

    def test_unstable_case(self, fast_config):
        """Test that disjoint intervals make storage run off."""
        spec = load_fixture("triangle_unstable")
        system = spec.to_system()
        assert analyze_cycle(system.network, [0, 1, 2]).classification == "unstable"
        traj = simulate(system, NetworkState.random(3, 3, seed=12), 200.0, fast_config)
        result = classify_trajectory(traj)
        assert result.kind == "divergent"
        assert traj.x[-1, 1] < traj.x[0, 1] - 50.0

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(10))
    def test_random_initial_states(self, seed, fast_config):
        """Test agreement on ten random initial states per configuration."""
        expected = {"triangle_consensus": "consensus", "triangle_unstable": "divergent"}
        for name, kind in expected.items():
            system = load_fixture(name).to_system()
            traj = simulate(system, NetworkState.random(3, 3, seed=seed), 200.0, fast_config)
            assert classify_trajectory(traj).kind == kind

        # clustering needs vertex 1 below the final level; shift a random draw accordingly
        spec = load_fixture("triangle_clustering")
        state = NetworkState.random(3, 3, seed=seed)
        x = np.array(state.x)
        x[1] = x.mean() - 1.5 - abs(x[1])
        traj = simulate(spec.to_system(), NetworkState.from_arrays(x, state.xc_array), 200.0, fast_config)
        assert classify_trajectory(traj).kind == "clustering"

    @pytest.mark.slow
    def test_random_cycles(self, fast_config):
        """Test agreement on random cycles with a known intersection type."""
        rng = np.random.default_rng(5)
        for trial in range(50):
            n = int(rng.integers(3, 6))
            edges = [(k, (k + 1) % n) for k in range(n)]
            if trial % 2 == 0:
                # common interior [1, 2] inside every interval
                intervals = [(1.0 - rng.uniform(0, 1), 2.0 + rng.uniform(0, 1)) for _ in range(n)]
                expected = "consensus"
            else:
                # one edge forced above another edge's maximum
                intervals = [(0.0, 3.0)] * n
                intervals[0] = (0.5, 1.0)
                intervals[1] = (1.5, 2.5)
                expected = "divergent"
            net = make_network(n, edges, intervals)
            assert analyze_cycle(net, range(n)).classification == (
                "consensus" if expected == "consensus" else "unstable"
            )
            traj = simulate(make_system(net), NetworkState.random(n, n, seed=trial), 200.0, fast_config)
            assert classify_trajectory(traj).kind == expected


class TestSharedEdgeTight:
    """Test the overlapping-cycle network whose certificate search is inconclusive."""

    def test_slow_contraction_is_not_clustering(self, fast_config):
        """Test that the still-contracting spread at T = 200 is not mistaken for clustering."""
        spec = load_fixture("shared_edge_tight")
        result = Simulator(fast_config).run(spec.to_system(), SimulateSpec(horizon=200.0, seed=spec.seed))
        assert result.status == "success"
        assert result.classification.kind != "clustering"
        assert result.classification.spread < 1e-2

    @pytest.mark.slow
    def test_simulation_reaches_consensus(self, fast_config):
        """Test that the network reaches consensus once the slow mode has decayed."""
        spec = load_fixture("shared_edge_tight")
        result = Simulator(fast_config).run(spec.to_system(), SimulateSpec(horizon=2000.0, seed=spec.seed))
        assert result.status == "success"
        assert result.classification.kind == "consensus"
        assert float(np.ptp(result.trajectory.x[-1])) < 1e-3


class TestQuarticNetwork:
    """Test consensus of a non-quadratic storage function."""

    def test_gradients_agree(self, fast_config):
        """Test that dH/dx reaches the predicted consensus value."""
        spec = load_fixture("quartic_cycle")
        result = Simulator(fast_config).run(spec.to_system(), SimulateSpec(horizon=100.0, seed=spec.seed))
        assert result.status == "success"
        assert result.classification.kind == "consensus"
        assert result.classification.alpha == pytest.approx(result.predicted_alpha, abs=1e-3)
