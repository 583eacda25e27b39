"""Pydantic models for flow constraints and edge mappings."""

import math
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from distnet.graph.models import DirectedGraph


class FlowConstraint(BaseModel):
    """Closed flow interval [lo, hi] of one edge, lo < hi."""

    lo: float = Field(..., description="Lower flow bound u-")
    hi: float = Field(..., description="Upper flow bound u+")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_interval(self) -> "FlowConstraint":
        """Bounds must be finite and strictly ordered."""
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"interval [{self.lo}, {self.hi}] must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"interval [{self.lo}, {self.hi}] needs lo < hi")
        return self

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def is_compatible(self) -> bool:
        """u+ > 0 and u- >= 0."""
        return self.hi > 0 and self.lo >= 0

    def shifted(self, eta: float) -> "FlowConstraint":
        return FlowConstraint(lo=self.lo + eta, hi=self.hi + eta)

    def negated(self) -> "FlowConstraint":
        """Interval [-hi, -lo] of the reversed edge."""
        return FlowConstraint(lo=-self.hi, hi=-self.lo)


class ConstrainedNetwork(BaseModel):
    """A graph together with one flow interval per edge."""

    graph: DirectedGraph = Field(..., description="Underlying directed graph")
    constraints: Tuple[FlowConstraint, ...] = Field(
        default=(), description="Flow interval per edge, in edge order"
    )

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_lengths(self) -> "ConstrainedNetwork":
        if len(self.constraints) != self.graph.m:
            raise ValueError(
                f"{len(self.constraints)} constraints for {self.graph.m} edges"
            )
        return self

    @classmethod
    def from_intervals(
        cls, n: int, edges: Sequence[Tuple[int, int]], intervals: Sequence[Tuple[float, float]]
    ) -> "ConstrainedNetwork":
        """Build from plain (tail, head) and (lo, hi) sequences."""
        return cls(
            graph=DirectedGraph(n=n, edges=tuple(tuple(e) for e in edges)),
            constraints=tuple(FlowConstraint(lo=lo, hi=hi) for lo, hi in intervals),
        )

    @property
    def lo(self) -> np.ndarray:
        return np.array([c.lo for c in self.constraints], dtype=float)

    @property
    def hi(self) -> np.ndarray:
        return np.array([c.hi for c in self.constraints], dtype=float)

    @property
    def is_compatible(self) -> bool:
        """Every interval satisfies u+ > 0 and u- >= 0."""
        return all(c.is_compatible for c in self.constraints)

    def intervals(self) -> List[Tuple[float, float]]:
        return [(c.lo, c.hi) for c in self.constraints]


class EdgeMapping(BaseModel):
    """Correspondence between the edges of an original and a transformed network.

    Transformed edge ``e`` stems from original edge ``source[e]``. Its
    controller state is ``sign[e] * (x_c[source[e]] + offset[e])`` and the
    original flow is recovered as
    ``u[i] = sum(sign[e] * u_new[e] for e with source[e] == i) - flow_offset[i]``.
    """

    original_m: int = Field(..., ge=0, description="Edge count of the original network")
    source: Tuple[int, ...] = Field(default=(), description="Original edge per new edge")
    sign: Tuple[int, ...] = Field(default=(), description="+1 kept, -1 reversed, per new edge")
    offset: Tuple[float, ...] = Field(
        default=(), description="Controller-state offset per new edge (before the sign)"
    )
    flow_offset: Tuple[float, ...] = Field(
        default=(), description="Flow shift per original edge"
    )

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_shape(self) -> "EdgeMapping":
        if not (len(self.source) == len(self.sign) == len(self.offset)):
            raise ValueError("source, sign and offset must have equal length")
        if len(self.flow_offset) != self.original_m:
            raise ValueError(
                f"flow_offset has {len(self.flow_offset)} entries, expected {self.original_m}"
            )
        for e, (i, s) in enumerate(zip(self.source, self.sign)):
            if not 0 <= i < self.original_m:
                raise ValueError(f"new edge {e} maps to unknown original edge {i}")
            if s not in (1, -1):
                raise ValueError(f"new edge {e} has sign {s}")
        covered = set(self.source)
        missing = [i for i in range(self.original_m) if i not in covered]
        if missing:
            raise ValueError(f"original edges {missing} have no image")
        return self

    @classmethod
    def identity(cls, m: int) -> "EdgeMapping":
        return cls(
            original_m=m,
            source=tuple(range(m)),
            sign=(1,) * m,
            offset=(0.0,) * m,
            flow_offset=(0.0,) * m,
        )

    @property
    def new_m(self) -> int:
        return len(self.source)

    def targets(self, edge_id: int) -> List[int]:
        """New edge ids produced from original edge ``edge_id``, ascending."""
        return [e for e, i in enumerate(self.source) if i == edge_id]

    def map_state(self, xc: np.ndarray) -> np.ndarray:
        """Controller state on the transformed network from the original one."""
        xc = np.asarray(xc, dtype=float)
        src = np.array(self.source, dtype=int)
        return np.array(self.sign, dtype=float) * (xc[src] + np.array(self.offset))

    def state_back(self, xc_new: np.ndarray) -> np.ndarray:
        """Original controller state read off the first image of every edge."""
        xc_new = np.asarray(xc_new, dtype=float)
        out = np.empty(self.original_m)
        for i in range(self.original_m):
            e = self.targets(i)[0]
            out[i] = self.sign[e] * xc_new[e] - self.offset[e]
        return out

    def map_flows_back(self, u_new: np.ndarray) -> np.ndarray:
        """Original flows from flows on the transformed network.

        Works on a single flow vector or on a stack of samples (last axis
        indexes edges).
        """
        u_new = np.asarray(u_new, dtype=float)
        signed = u_new * np.array(self.sign, dtype=float)
        out = np.zeros(u_new.shape[:-1] + (self.original_m,))
        for e, i in enumerate(self.source):
            out[..., i] += signed[..., e]
        return out - np.array(self.flow_offset)

    def compose(self, then: "EdgeMapping") -> "EdgeMapping":
        """Mapping original -> final, where ``then`` acts on this mapping's output."""
        if then.original_m != self.new_m:
            raise ValueError(
                f"cannot compose: {self.new_m} intermediate edges vs {then.original_m}"
            )
        source, sign, offset = [], [], []
        for e, mid in enumerate(then.source):
            source.append(self.source[mid])
            sign.append(then.sign[e] * self.sign[mid])
            offset.append(self.offset[mid] + self.sign[mid] * then.offset[e])
        flow_offset = list(self.flow_offset)
        for mid, i in enumerate(self.source):
            flow_offset[i] += self.sign[mid] * then.flow_offset[mid]
        return EdgeMapping(
            original_m=self.original_m,
            source=tuple(source),
            sign=tuple(sign),
            offset=tuple(offset),
            flow_offset=tuple(flow_offset),
        )
