"""Incidence algebra and connectivity predicates."""

import logging
from typing import List, Set, Tuple

import networkx as nx
import numpy as np

from distnet.graph.models import DirectedGraph

logger = logging.getLogger(__name__)


def incidence(graph: DirectedGraph) -> np.ndarray:
    """Return the n x m incidence matrix B of ``graph``.

    Column j has -1 at the tail and +1 at the head of edge j, so every
    column sums to zero.

    Example:
        >>> incidence(DirectedGraph(n=2, edges=((0, 1),)))
        array([[-1],
               [ 1]])
    """
    return graph.incidence_matrix


def weakly_connected_components(graph: DirectedGraph) -> List[Set[int]]:
    """Vertex sets of the weakly connected components, ordered by smallest vertex."""
    components = nx.weakly_connected_components(graph.to_networkx())
    return sorted((set(c) for c in components), key=min)


def component_count(graph: DirectedGraph) -> int:
    """Number of weakly connected components, equal to dim ker B^T."""
    return nx.number_weakly_connected_components(graph.to_networkx())


def is_weakly_connected(graph: DirectedGraph) -> bool:
    """True iff undirected reachability spans every vertex."""
    return component_count(graph) == 1


def strongly_connected_components(graph: DirectedGraph) -> List[Set[int]]:
    """Vertex sets of the strongly connected components, ordered by smallest vertex."""
    components = nx.strongly_connected_components(graph.to_networkx())
    return sorted((set(c) for c in components), key=min)


def is_strongly_connected(graph: DirectedGraph) -> bool:
    """True iff every ordered vertex pair is joined by a directed path."""
    return nx.is_strongly_connected(graph.to_networkx())


def is_balanced(graph: DirectedGraph) -> bool:
    """True iff in-degree equals out-degree everywhere, i.e. B 1 = 0."""
    B = incidence(graph)
    return bool(np.all(B.sum(axis=1) == 0))


def bridging_edges(graph: DirectedGraph) -> List[int]:
    """Edges whose endpoints lie in different strongly connected components.

    These are exactly the edges that lie on no directed cycle.
    """
    label = {}
    for idx, component in enumerate(strongly_connected_components(graph)):
        for v in component:
            label[v] = idx
    return [j for j, (tail, head) in enumerate(graph.edges) if label[tail] != label[head]]


def upstream_closure(graph: DirectedGraph, vertex: int) -> Set[int]:
    """All vertices with a directed path to ``vertex`` (including itself)."""
    g = graph.to_networkx()
    return set(nx.ancestors(g, vertex)) | {vertex}


def matching_state(
    graph: DirectedGraph, target: np.ndarray
) -> Tuple[np.ndarray, float]:
    """Minimum-norm least-squares solution of B x_c = target.

    Args:
        graph: Graph providing B
        target: Desired vertex vector (usually E @ dbar)

    Returns:
        ``(x_c, residual)`` with ``residual = ||B x_c - target||``
    """
    target = np.asarray(target, dtype=float)
    if graph.m == 0:
        return np.zeros(0), float(np.linalg.norm(target))
    B = incidence(graph).astype(float)
    xbar, *_ = np.linalg.lstsq(B, target, rcond=None)
    residual = float(np.linalg.norm(B @ xbar - target))
    logger.debug(f"Matching state residual {residual:.3e} on {graph.m} edges")
    return xbar, residual
