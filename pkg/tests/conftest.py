"""Shared pytest fixtures for all distnet tests."""

import logging
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np
import pytest

from distnet.cli.specfile import NetworkSpecFile, load_spec
from distnet.common.config import SimulationConfig
from distnet.constraints.models import ConstrainedNetwork
from distnet.dynamics.hamiltonians import Hamiltonian
from distnet.dynamics.models import NetworkSystem
from distnet.graph.models import DirectedGraph, TerminalPattern

FIXTURES = Path(__file__).parent / "fixtures"

TRIANGLE = ((0, 1), (1, 2), (2, 0))
# 0->1->2->0 plus the detour 0->3->2; edge 2 is shared by both cycles
SHARED_EDGE = ((0, 1), (1, 2), (2, 0), (0, 3), (3, 2))


def fixture_path(name: str) -> Path:
    """Path of a JSON spec under tests/fixtures."""
    return FIXTURES / f"{name}.json"


def load_fixture(name: str) -> NetworkSpecFile:
    """Parsed spec file from tests/fixtures."""
    return load_spec(fixture_path(name))


def make_network(
    n: int, edges: Sequence[Tuple[int, int]], intervals: Sequence[Tuple[float, float]]
) -> ConstrainedNetwork:
    return ConstrainedNetwork.from_intervals(n, edges, intervals)


def make_system(
    net: ConstrainedNetwork,
    hamiltonian: Optional[Hamiltonian] = None,
    terminals: Sequence[Tuple[int, int]] = (),
    disturbance: Sequence[float] = (),
) -> NetworkSystem:
    """Constrained system on ``net``."""
    kwargs = {}
    if hamiltonian is not None:
        kwargs["hamiltonian"] = hamiltonian
    return NetworkSystem(
        graph=net.graph,
        constraints=net.constraints,
        terminals=TerminalPattern(columns=tuple(terminals)),
        disturbance=tuple(disturbance),
        **kwargs,
    )


def random_graph(rng: np.random.Generator, n: int, m: int) -> DirectedGraph:
    """Random multigraph without self-loops."""
    edges = []
    while len(edges) < m:
        tail, head = (int(v) for v in rng.integers(0, n, size=2))
        if tail != head:
            edges.append((tail, head))
    return DirectedGraph(n=n, edges=tuple(edges))


def random_strongly_connected(rng: np.random.Generator, n: int, extra: int) -> DirectedGraph:
    """Hamiltonian cycle through a random permutation plus ``extra`` random chords."""
    order = [int(v) for v in rng.permutation(n)]
    edges = [(order[k], order[(k + 1) % n]) for k in range(n)]
    return DirectedGraph(n=n, edges=tuple(edges) + random_graph(rng, n, extra).edges)


def random_weakly_connected(rng: np.random.Generator, n: int, extra: int) -> DirectedGraph:
    """Randomly oriented spanning tree plus ``extra`` random chords.

    With ``extra=0`` the result is an oriented tree, never strongly connected
    for n >= 2.
    """
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append((u, v) if rng.random() < 0.5 else (v, u))
    return DirectedGraph(n=n, edges=tuple(edges) + random_graph(rng, n, extra).edges)


def random_cycle_union(rng: np.random.Generator, n: int, max_edges: int) -> DirectedGraph:
    """Edge union of random simple cycles; balanced by construction."""
    edges = []
    while True:
        length = int(rng.integers(2, min(n, 4) + 1))
        if len(edges) + length > max_edges:
            break
        nodes = [int(v) for v in rng.choice(n, size=length, replace=False)]
        edges.extend(zip(nodes, nodes[1:] + nodes[:1]))
    return DirectedGraph(n=n, edges=tuple(edges))


@pytest.fixture
def triangle_graph() -> DirectedGraph:
    """Directed 3-cycle 0->1->2->0."""
    return DirectedGraph(n=3, edges=TRIANGLE)


@pytest.fixture
def shared_edge_graph() -> DirectedGraph:
    """Unbalanced strongly connected graph with two overlapping cycles."""
    return DirectedGraph(n=4, edges=SHARED_EDGE)


@pytest.fixture
def shared_edge_widened() -> ConstrainedNetwork:
    """Overlapping cycles where splitting the shared edge gives consensus."""
    return make_network(4, SHARED_EDGE, [(0.3, 1), (0.3, 1), (0.3, 1.6), (0.3, 1), (0.3, 1)])


@pytest.fixture
def shared_edge_tight() -> ConstrainedNetwork:
    """Overlapping cycles with no feasible splitting of the shared edge."""
    return make_network(4, SHARED_EDGE, [(0.3, 1), (0.3, 1), (0.5, 0.8), (0.3, 1), (0.3, 1)])


@pytest.fixture
def fast_config() -> SimulationConfig:
    """Coarser step for tests; RK4 stays well inside the conservation tolerance."""
    return SimulationConfig(step=1e-2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240501)


@pytest.fixture(autouse=True)
def reset_distnet_logger():
    """Undo setup_logging() from CLI tests so caplog sees library records."""
    yield
    logger = logging.getLogger("distnet")
    logger.handlers.clear()
    logger.setLevel(logging.NOTSET)
    logger.propagate = True
