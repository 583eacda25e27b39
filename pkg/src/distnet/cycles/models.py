"""Pydantic models for directed cycles, covers and augmented networks."""

from collections import Counter
from typing import Dict, Iterable, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from distnet.common.exceptions import NotACycleError
from distnet.constraints.models import ConstrainedNetwork, EdgeMapping
from distnet.graph.models import DirectedGraph


class DirectedCycle(BaseModel):
    """Edge ids of a directed cycle in traversal order."""

    edges: Tuple[int, ...] = Field(..., min_length=1, description="Edge ids, head to tail chained")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_distinct(self) -> "DirectedCycle":
        if len(set(self.edges)) != len(self.edges):
            raise ValueError(f"cycle {self.edges} repeats an edge")
        return self

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, edge_id: object) -> bool:
        return edge_id in self.edges

    def check_on(self, graph: DirectedGraph) -> "DirectedCycle":
        """Verify the chaining head(e_k) == tail(e_{k+1}) on ``graph``.

        Raises:
            NotACycleError: If an edge is unknown or the chain is broken
        """
        for e in self.edges:
            if not 0 <= e < graph.m:
                raise NotACycleError(f"edge {e} is not an edge of the graph")
        for a, b in zip(self.edges, self.edges[1:] + self.edges[:1]):
            if graph.edges[a][1] != graph.edges[b][0]:
                raise NotACycleError(
                    f"edges {a} and {b} do not chain ({graph.edges[a]} -> {graph.edges[b]})"
                )
        return self

    @classmethod
    def from_edges(cls, graph: DirectedGraph, edge_ids: Iterable[int]) -> "DirectedCycle":
        """Order an unordered edge set into a single directed cycle.

        Traversal starts at the lowest edge id.

        Raises:
            NotACycleError: If the edges do not form exactly one directed cycle
        """
        ids = sorted(set(edge_ids))
        if not ids:
            raise NotACycleError("empty edge set")
        for e in ids:
            if not 0 <= e < graph.m:
                raise NotACycleError(f"edge {e} is not an edge of the graph")
        by_tail: Dict[int, list] = {}
        for e in ids:
            by_tail.setdefault(graph.edges[e][0], []).append(e)
        if any(len(out) != 1 for out in by_tail.values()):
            raise NotACycleError(f"edges {ids} leave some vertex more than once")

        order = [ids[0]]
        while True:
            head = graph.edges[order[-1]][1]
            if head not in by_tail:
                raise NotACycleError(f"edges {ids} do not close into a cycle")
            nxt = by_tail[head][0]
            if nxt == order[0]:
                break
            if nxt in order:
                raise NotACycleError(f"edges {ids} contain a cycle not through edge {ids[0]}")
            order.append(nxt)
        if len(order) != len(ids):
            raise NotACycleError(f"edges {ids} form more than one cycle")
        return cls(edges=tuple(order))

    def key(self) -> Tuple[int, ...]:
        """Order-independent identity of the cycle."""
        return tuple(sorted(self.edges))


class CycleCover(BaseModel):
    """Covering set of cycles together with its multiplicity vector T."""

    cycles: Tuple[DirectedCycle, ...] = Field(default=(), description="Covering cycles")
    multiplicity: Tuple[int, ...] = Field(
        default=(), description="T_i = number of cycles containing edge i"
    )

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_counts(self) -> "CycleCover":
        counts = Counter(e for c in self.cycles for e in c.edges)
        m = len(self.multiplicity)
        unknown = [e for e in counts if not 0 <= e < m]
        if unknown:
            raise ValueError(f"cycles use edges {unknown} outside the multiplicity vector")
        for i, t in enumerate(self.multiplicity):
            if counts.get(i, 0) != t:
                raise ValueError(f"edge {i} lies on {counts.get(i, 0)} cycles, T_i = {t}")
        return self

    @property
    def total(self) -> int:
        """Sum of the multiplicities."""
        return sum(self.multiplicity)

    @property
    def is_cover(self) -> bool:
        return all(t >= 1 for t in self.multiplicity)

    @property
    def is_partition(self) -> bool:
        """Every edge lies on exactly one cycle."""
        return all(t == 1 for t in self.multiplicity)

    def cycles_through(self, edge_id: int) -> list[int]:
        """Indices of the cycles containing ``edge_id``, ascending."""
        return [j for j, c in enumerate(self.cycles) if edge_id in c]

    @classmethod
    def from_cycles(cls, cycles: Iterable[DirectedCycle], m: int) -> "CycleCover":
        cycles = tuple(cycles)
        counts = Counter(e for c in cycles for e in c.edges)
        return cls(cycles=cycles, multiplicity=tuple(counts.get(i, 0) for i in range(m)))


class AugmentedNetwork(BaseModel):
    """Network with every edge split once per covering cycle.

    ``assignment[i][r]`` is the copy of edge i used by the r-th cycle (in
    ascending cycle index) that contains edge i.
    """

    network: ConstrainedNetwork = Field(..., description="Split, balanced network")
    mapping: EdgeMapping = Field(..., description="Original edges -> split copies")
    cover: CycleCover = Field(..., description="Non-overlapping cycles of the split network")
    base_cover: CycleCover = Field(..., description="Cover of the original network")
    breakpoints: Dict[int, Tuple[float, ...]] = Field(
        default_factory=dict, description="Breakpoints used per original edge"
    )
    assignment: Dict[int, Tuple[int, ...]] = Field(
        default_factory=dict, description="Cycle -> copy assignment per original edge"
    )

    model_config = ConfigDict(frozen=True)
