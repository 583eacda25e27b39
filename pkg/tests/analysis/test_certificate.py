"""Tests for the consensus certificate search."""

import pytest

from distnet.analysis import (
    ConsensusCertificate,
    Inconclusive,
    certify_consensus,
    copy_assignments,
    cycle_intersections,
    max_margin,
    verify_certificate,
)
from distnet.common.config import AnalysisConfig
from distnet.common.exceptions import IncompatibleOrientationError
from distnet.cycles import CycleCover, DirectedCycle, minimal_cover
from distnet.dynamics import NetworkState, classify_trajectory, simulate
from tests.conftest import SHARED_EDGE, make_network, make_system, random_strongly_connected


class TestCopyAssignments:
    """Test enumeration of cycle-to-copy assignments."""

    def test_no_shared_edges(self):
        """Test that a partition has exactly the empty assignment."""
        cover = CycleCover(cycles=(DirectedCycle(edges=(0, 1, 2)),), multiplicity=(1, 1, 1))
        assert list(copy_assignments(cover)) == [{}]

    def test_two_copies(self, shared_edge_graph):
        """Test both choices of the cycle receiving the lower copy."""
        assert list(copy_assignments(minimal_cover(shared_edge_graph))) == [{2: (0, 1)}, {2: (1, 0)}]

    def test_three_copies(self):
        """Test that only the position of copy 0 is enumerated."""
        cover = CycleCover(
            cycles=(DirectedCycle(edges=(0, 1)), DirectedCycle(edges=(0, 2)), DirectedCycle(edges=(0, 3))),
            multiplicity=(3, 1, 1, 1),
        )
        assert [a[0] for a in copy_assignments(cover)] == [(0, 1, 2), (1, 0, 2), (1, 2, 0)]


class TestMaxMargin:
    """Test the max-min width linear program."""

    def test_widened_network(self, shared_edge_widened):
        """Test that the shared edge [0.3, 1.6] is best split at 0.8."""
        cover = minimal_cover(shared_edge_widened.graph)
        t, points = max_margin(shared_edge_widened, cover, {2: (0, 1)})
        assert t == pytest.approx(0.5, abs=1e-9)
        assert points[2] == pytest.approx((0.8,), abs=1e-9)

    def test_shared_edge_tight_has_no_interior(self, shared_edge_tight):
        """Test that no breakpoint in [0.5, 0.8] helps both cycles."""
        cover = minimal_cover(shared_edge_tight.graph)
        for assignment in copy_assignments(cover):
            t, _ = max_margin(shared_edge_tight, cover, assignment)
            assert t <= 1e-9

    def test_without_split_edges(self):
        """Test that a partition needs no LP and returns the smallest width."""
        net = make_network(3, ((0, 1), (1, 2), (2, 0)), [(1, 2.5), (2, 3), (0, 3)])
        cover = minimal_cover(net.graph)
        assert max_margin(net, cover, {}) == (pytest.approx(0.5), {})


class TestCertify:
    """Test the full search."""

    def test_widened_network_is_certified(self, shared_edge_widened):
        """Test that a certificate is found and re-verifies."""
        result = certify_consensus(shared_edge_widened)
        assert isinstance(result, ConsensusCertificate)
        assert result.cover.multiplicity == (1, 1, 2, 1, 1)
        assert result.margin == pytest.approx(0.5, abs=1e-9)
        assert result.covers_tried == 1
        assert result.assignments_tried == 1
        assert verify_certificate(shared_edge_widened, result)
        for cut in result.intersections:
            assert cut.lower == pytest.approx(0.3)
            assert cut.upper == pytest.approx(0.8, abs=1e-9)

    def test_tampered_certificate_fails(self, shared_edge_widened):
        """Test that a certificate with a moved breakpoint no longer verifies."""
        result = certify_consensus(shared_edge_widened)
        tampered = result.model_copy(update={"breakpoints": {2: (1.5,)}})
        assert not verify_certificate(shared_edge_widened, tampered)

    def test_certificate_on_other_network_fails(self, shared_edge_widened, shared_edge_tight):
        """Test that breakpoints outside the intervals are rejected."""
        result = certify_consensus(shared_edge_widened)
        assert not verify_certificate(shared_edge_tight, result)

    def test_shared_edge_tight_is_inconclusive(self, shared_edge_tight):
        """Test that the search gives up without claiming instability."""
        result = certify_consensus(shared_edge_tight)
        assert isinstance(result, Inconclusive)
        assert result.reason == "no_feasible_splitting"
        assert result.assignments_tried == 2
        assert result.best_margin == pytest.approx(0.0, abs=1e-9)

    def test_search_limit(self, shared_edge_tight):
        """Test that a capped search reports search_limit."""
        result = certify_consensus(shared_edge_tight, AnalysisConfig(max_assignments=1))
        assert isinstance(result, Inconclusive)
        assert result.reason == "search_limit"
        assert result.assignments_tried == 1

    def test_not_strongly_connected(self):
        """Test that a path has no covering cycles."""
        net = make_network(3, ((0, 1), (1, 2)), [(0, 1), (0, 1)])
        result = certify_consensus(net)
        assert isinstance(result, Inconclusive)
        assert result.reason == "not_strongly_connected"

    def test_incompatible_orientation(self):
        """Test that the search needs a normalized network."""
        net = make_network(4, SHARED_EDGE, [(-0.3, 1), (0.3, 1), (0.3, 1.6), (0.3, 1), (0.3, 1)])
        with pytest.raises(IncompatibleOrientationError):
            certify_consensus(net)


def test_cycle_intersections(shared_edge_widened):
    """Test intersections recomputed for a hand-picked split."""
    cover = minimal_cover(shared_edge_widened.graph)
    first, second = cycle_intersections(shared_edge_widened, cover, {2: (0.95,)}, {2: (0, 1)})
    assert first.cycle == (0, 1, 2)
    assert (first.lower, first.upper) == pytest.approx((0.3, 0.95))
    assert (second.lower, second.upper) == pytest.approx((0.3, 0.65))
    assert first.width == pytest.approx(0.65)


@pytest.mark.slow
def test_certified_networks_never_diverge(rng, fast_config):
    """Test that no certified random network runs off in simulation."""
    certified = 0
    for trial in range(30):
        graph = random_strongly_connected(rng, n=int(rng.integers(3, 6)), extra=int(rng.integers(1, 4)))
        lo = rng.uniform(0, 0.3, graph.m)
        hi = lo + rng.uniform(0.5, 2.0, graph.m)
        net = make_network(graph.n, graph.edges, list(zip(lo, hi)))
        if not isinstance(certify_consensus(net), ConsensusCertificate):
            continue
        certified += 1
        state = NetworkState.random(graph.n, graph.m, seed=trial, scale=3.0)
        traj = simulate(make_system(net), state, 200.0, fast_config)
        assert classify_trajectory(traj).kind != "divergent", (graph.edges, lo, hi)
    assert certified >= 3
