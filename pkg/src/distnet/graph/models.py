"""Pydantic models for directed graphs and terminal patterns."""

from typing import Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from distnet.common.exceptions import InvalidGraphError


class DirectedGraph(BaseModel):
    """Directed multigraph on vertices ``0..n-1``.

    Edge ``j`` is column ``j`` of the incidence matrix; the order is stable.
    Parallel edges are allowed, self-loops are not.
    """

    n: int = Field(..., ge=1, description="Number of vertices")
    edges: Tuple[Tuple[int, int], ...] = Field(
        default=(),
        description="Ordered (tail, head) pairs; edge id is the position",
    )

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_edges(self) -> "DirectedGraph":
        """Reject self-loops and out-of-range vertex ids.

        Raises:
            InvalidGraphError: On a self-loop or an unknown vertex id; raised
                as is, not as a ValidationError
        """
        for j, (tail, head) in enumerate(self.edges):
            if not (0 <= tail < self.n and 0 <= head < self.n):
                raise InvalidGraphError(
                    f"edge {j} ({tail}->{head}) references a vertex outside [0, {self.n})"
                )
            if tail == head:
                raise InvalidGraphError(f"edge {j} is a self-loop at vertex {tail}")
        return self

    @property
    def m(self) -> int:
        """Number of edges."""
        return len(self.edges)

    @property
    def tails(self) -> np.ndarray:
        return np.array([e[0] for e in self.edges], dtype=int)

    @property
    def heads(self) -> np.ndarray:
        return np.array([e[1] for e in self.edges], dtype=int)

    @property
    def incidence_matrix(self) -> np.ndarray:
        """Integer n x m incidence matrix: -1 at the tail, +1 at the head."""
        B = np.zeros((self.n, self.m), dtype=int)
        cols = np.arange(self.m)
        B[self.tails, cols] = -1
        B[self.heads, cols] = 1
        return B

    def out_edges(self, vertex: int) -> list[int]:
        """Edge ids leaving ``vertex`` in ascending order."""
        return [j for j, (tail, _) in enumerate(self.edges) if tail == vertex]

    def to_networkx(self) -> nx.MultiDiGraph:
        """MultiDiGraph view with the edge id stored as the edge key."""
        g = nx.MultiDiGraph()
        g.add_nodes_from(range(self.n))
        for j, (tail, head) in enumerate(self.edges):
            g.add_edge(tail, head, key=j)
        return g

    def reversed_edge(self, edge_id: int) -> Tuple[int, int]:
        tail, head = self.edges[edge_id]
        return head, tail


class TerminalPattern(BaseModel):
    """Terminal vertices where constant external flow enters or leaves.

    Column ``k`` of the matrix E has a single entry ``sign`` at ``vertex``:
    +1 marks an inflow (source), -1 an outflow (sink).
    """

    columns: Tuple[Tuple[int, int], ...] = Field(
        default=(),
        description="(vertex id, sign) per terminal column",
    )

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_signs(self) -> "TerminalPattern":
        """Each column carries exactly one +1 or -1."""
        for k, (vertex, sign) in enumerate(self.columns):
            if sign not in (1, -1):
                raise ValueError(f"terminal {k} has sign {sign}, expected +1 or -1")
            if vertex < 0:
                raise ValueError(f"terminal {k} has negative vertex id {vertex}")
        return self

    @property
    def k(self) -> int:
        """Number of terminal columns."""
        return len(self.columns)

    def matrix(self, n: int) -> np.ndarray:
        """The n x k matrix E."""
        E = np.zeros((n, self.k), dtype=int)
        for col, (vertex, sign) in enumerate(self.columns):
            if vertex >= n:
                raise ValueError(f"terminal {col} references vertex {vertex} >= {n}")
            E[vertex, col] = sign
        return E

    def inflow(self, n: int, dbar: np.ndarray) -> np.ndarray:
        """Net external inflow per vertex, E @ dbar."""
        dbar = np.asarray(dbar, dtype=float)
        if dbar.shape != (self.k,):
            raise ValueError(f"disturbance has length {dbar.size}, expected {self.k}")
        return self.matrix(n) @ dbar
