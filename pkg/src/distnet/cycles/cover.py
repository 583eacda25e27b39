"""Cycle decompositions, minimal covers and graph augmentation."""

import itertools
import logging
from collections import deque
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from distnet.common.exceptions import (
    InvalidBreakpointsError,
    NotBalancedError,
    NotStronglyConnectedError,
)
from distnet.constraints.models import ConstrainedNetwork
from distnet.constraints.transform import split_edges
from distnet.cycles.models import AugmentedNetwork, CycleCover, DirectedCycle
from distnet.graph.core import incidence, is_balanced, is_strongly_connected
from distnet.graph.models import DirectedGraph

logger = logging.getLogger(__name__)


def _peel_cycles(n: int, arcs: Sequence[Tuple[int, int, int]]) -> List[List[int]]:
    """Greedy cycle extraction on a balanced arc list.

    ``arcs`` holds ``(tail, head, label)`` in priority order. Walks unused
    out-arcs (first in priority order) until a vertex repeats, peels the
    closed loop and continues from the repeated vertex.
    """
    unused: List[deque] = [deque() for _ in range(n)]
    for a, (tail, _, _) in enumerate(arcs):
        unused[tail].append(a)

    cycles: List[List[int]] = []
    while True:
        start = next((v for v in range(n) if unused[v]), None)
        if start is None:
            return cycles
        path_vertices = [start]
        path_arcs: List[int] = []
        position = {start: 0}
        v = start
        while True:
            if not unused[v]:
                raise NotBalancedError(f"walk stuck at vertex {v}: graph is not balanced")
            a = unused[v].popleft()
            w = arcs[a][1]
            path_arcs.append(a)
            if w in position:
                k = position[w]
                cycles.append([arcs[b][2] for b in path_arcs[k:]])
                for u in path_vertices[k + 1:]:
                    del position[u]
                path_vertices = path_vertices[: k + 1]
                path_arcs = path_arcs[:k]
                v = w
                if not path_arcs and not unused[v]:
                    break
            else:
                position[w] = len(path_vertices)
                path_vertices.append(w)
                v = w


def decompose_balanced(graph: DirectedGraph) -> List[DirectedCycle]:
    """Partition the edges of a balanced, strongly connected graph into cycles.

    Raises:
        NotStronglyConnectedError: If the graph is not strongly connected
        NotBalancedError: If in-degree and out-degree differ somewhere
    """
    if not is_strongly_connected(graph):
        raise NotStronglyConnectedError("cycle decomposition needs a strongly connected graph")
    if not is_balanced(graph):
        raise NotBalancedError("cycle decomposition needs a balanced graph")
    arcs = [(tail, head, j) for j, (tail, head) in enumerate(graph.edges)]
    cycles = [DirectedCycle(edges=tuple(c)) for c in _peel_cycles(graph.n, arcs)]
    logger.debug(f"Decomposed {graph.m} edges into {len(cycles)} cycles")
    return cycles


def minimal_multiplicity(graph: DirectedGraph) -> np.ndarray:
    """Minimum total multiplicity T with B T = 0 and T >= 1.

    Solved as a min-cost circulation with unit costs. The lower bound 1 is
    removed by sending one unit on every edge, leaving node demands
    out_degree - in_degree for the extra flow.

    Raises:
        NotStronglyConnectedError: If the graph is not strongly connected
    """
    if not is_strongly_connected(graph):
        raise NotStronglyConnectedError("a covering set of cycles needs a strongly connected graph")
    imbalance = incidence(graph).sum(axis=1)

    flow_graph = nx.DiGraph()
    for v in range(graph.n):
        flow_graph.add_node(v, demand=int(-imbalance[v]))
    first_edge: Dict[Tuple[int, int], int] = {}
    for j, (tail, head) in enumerate(graph.edges):
        if (tail, head) not in first_edge:
            first_edge[(tail, head)] = j
            flow_graph.add_edge(tail, head, weight=1)

    multiplicity = np.ones(graph.m, dtype=int)
    if np.any(imbalance):
        flow = nx.min_cost_flow(flow_graph)
        for (tail, head), j in first_edge.items():
            multiplicity[j] += int(flow[tail][head])
    return multiplicity


def cycles_from_multiplicity(graph: DirectedGraph, multiplicity: Sequence[int]) -> List[DirectedCycle]:
    """Greedy decomposition of the circulation T into cycles of ``graph``."""
    arcs = [
        (tail, head, j)
        for j, (tail, head) in enumerate(graph.edges)
        for _ in range(int(multiplicity[j]))
    ]
    return [DirectedCycle(edges=tuple(c)) for c in _peel_cycles(graph.n, arcs)]


def minimal_cover(graph: DirectedGraph) -> CycleCover:
    """Covering set of cycles with minimal total multiplicity.

    Example:
        The unbalanced 5-edge graph 1->2->3->1, 1->4->3 yields
        T = [1, 1, 2, 1, 1] with cycles {e1, e2, e3} and {e3, e4, e5}.

    Raises:
        NotStronglyConnectedError: If the graph is not strongly connected
    """
    multiplicity = minimal_multiplicity(graph)
    cycles = cycles_from_multiplicity(graph, multiplicity)
    cover = CycleCover(cycles=tuple(cycles), multiplicity=tuple(int(t) for t in multiplicity))
    logger.info(
        f"Minimal cover: {len(cycles)} cycles, total multiplicity {cover.total} on {graph.m} edges"
    )
    return cover


def edge_cycles(graph: DirectedGraph) -> List[DirectedCycle]:
    """All simple directed cycles as edge sequences (parallel edges expanded)."""
    parallel: Dict[Tuple[int, int], List[int]] = {}
    for j, edge in enumerate(graph.edges):
        parallel.setdefault(edge, []).append(j)
    simple = nx.DiGraph()
    simple.add_nodes_from(range(graph.n))
    simple.add_edges_from(parallel)

    found = []
    for nodes in nx.simple_cycles(simple):
        pairs = list(zip(nodes, nodes[1:] + nodes[:1]))
        for choice in itertools.product(*(parallel[p] for p in pairs)):
            found.append(DirectedCycle(edges=tuple(choice)))
    found.sort(key=lambda c: (len(c), c.key()))
    return found


def enumerate_covers(
    graph: DirectedGraph, multiplicity: Sequence[int], limit: int = 16
) -> Iterator[CycleCover]:
    """Distinct decompositions of the circulation T into simple cycles.

    The greedy decomposition comes first; at most ``limit`` covers are
    produced in total.
    """
    target = tuple(int(t) for t in multiplicity)
    first = CycleCover(
        cycles=tuple(cycles_from_multiplicity(graph, target)), multiplicity=target
    )
    seen = {tuple(sorted(c.key() for c in first.cycles))}
    yield first
    produced = 1
    if produced >= limit:
        return

    candidates = edge_cycles(graph)

    def search(remaining: List[int], chosen: List[DirectedCycle]) -> Iterator[List[DirectedCycle]]:
        edge = next((i for i, r in enumerate(remaining) if r > 0), None)
        if edge is None:
            yield list(chosen)
            return
        for cycle in candidates:
            if edge in cycle and all(remaining[e] > 0 for e in cycle.edges):
                for e in cycle.edges:
                    remaining[e] -= 1
                chosen.append(cycle)
                yield from search(remaining, chosen)
                chosen.pop()
                for e in cycle.edges:
                    remaining[e] += 1

    for cycles in search(list(target), []):
        signature = tuple(sorted(c.key() for c in cycles))
        if signature in seen:
            continue
        seen.add(signature)
        yield CycleCover(cycles=tuple(cycles), multiplicity=target)
        produced += 1
        if produced >= limit:
            return


def default_breakpoints(net: ConstrainedNetwork, cover: CycleCover) -> Dict[int, Tuple[float, ...]]:
    """T_i - 1 equally spaced breakpoints inside every multiply covered interval."""
    points: Dict[int, Tuple[float, ...]] = {}
    for i, (c, t) in enumerate(zip(net.constraints, cover.multiplicity)):
        if t > 1:
            points[i] = tuple(c.lo + (c.hi - c.lo) * k / t for k in range(1, t))
    return points


def augment(
    net: ConstrainedNetwork,
    cover: CycleCover,
    breakpoints: Optional[Dict[int, Sequence[float]]] = None,
    assignment: Optional[Dict[int, Sequence[int]]] = None,
) -> AugmentedNetwork:
    """Split every edge into T_i copies so the covering cycles no longer overlap.

    Args:
        net: Compatible network whose graph the cover belongs to
        cover: Covering set of cycles with multiplicity T
        breakpoints: T_i - 1 ascending breakpoints per edge with T_i > 1
            (default: equally spaced)
        assignment: Per edge, the copy index used by each cycle through it,
            in ascending cycle order (default: identity)

    Returns:
        AugmentedNetwork whose cover partitions the split edges

    Raises:
        InvalidBreakpointsError: On arity mismatch or breakpoints outside the interval
    """
    m = net.graph.m
    if len(cover.multiplicity) != m:
        raise InvalidBreakpointsError(f"cover has {len(cover.multiplicity)} entries for {m} edges")
    for cycle in cover.cycles:
        cycle.check_on(net.graph)

    if breakpoints is None:
        breakpoints = default_breakpoints(net, cover)
    points: Dict[int, Tuple[float, ...]] = {}
    for i, t in enumerate(cover.multiplicity):
        given = tuple(float(b) for b in breakpoints.get(i, ()))
        if len(given) != max(t - 1, 0):
            raise InvalidBreakpointsError(
                f"edge {i} has T_i = {t} and needs {max(t - 1, 0)} breakpoints, got {len(given)}"
            )
        if given:
            points[i] = given

    split, mapping = split_edges(net, points)

    order: Dict[int, Tuple[int, ...]] = {}
    for i, t in enumerate(cover.multiplicity):
        perm = tuple(assignment[i]) if assignment and i in assignment else tuple(range(t))
        if sorted(perm) != list(range(t)):
            raise InvalidBreakpointsError(f"assignment {perm} for edge {i} is not a permutation of {t} copies")
        order[i] = perm

    used: Dict[int, int] = {i: 0 for i in range(m)}
    new_cycles = []
    for cycle in cover.cycles:
        copies = []
        for e in cycle.edges:
            copies.append(mapping.targets(e)[order[e][used[e]]])
            used[e] += 1
        new_cycles.append(DirectedCycle(edges=tuple(copies)))

    new_cover = CycleCover.from_cycles(new_cycles, split.graph.m)
    if not (new_cover.is_partition and is_balanced(split.graph)):
        raise NotBalancedError("augmented graph is not covered by non-overlapping cycles")

    logger.info(f"Augmented {m} edges into {split.graph.m} (total multiplicity {cover.total})")
    return AugmentedNetwork(
        network=split,
        mapping=mapping,
        cover=new_cover,
        base_cover=cover,
        breakpoints=points,
        assignment={i: p for i, p in order.items() if len(p) > 1},
    )
