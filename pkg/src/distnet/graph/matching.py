"""Matching condition: does a controller state absorb the in/outflows?"""

import logging
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from distnet.graph.core import matching_state
from distnet.graph.models import DirectedGraph, TerminalPattern

logger = logging.getLogger(__name__)


class MatchResult(BaseModel):
    """Outcome of checking B x_c = E d for a constant disturbance d."""

    matchable: bool = Field(..., description="Whether a matching controller state exists")
    failure: Optional[str] = Field(
        default=None,
        description="'unbalanced_inflow' (1^T E d != 0) or 'not_in_image' (E d outside im B)",
    )
    total_inflow: float = Field(..., description="1^T E d, the net external inflow")
    residual: float = Field(..., description="||B x_c - E d|| of the least-squares solution")
    xbar_c: Optional[Tuple[float, ...]] = Field(
        default=None, description="Minimum-norm matching controller state when matchable"
    )

    model_config = ConfigDict(frozen=True)

    @property
    def xbar(self) -> np.ndarray:
        if self.xbar_c is None:
            raise ValueError(f"no matching controller state ({self.failure})")
        return np.array(self.xbar_c, dtype=float)


def check_matching(
    terminals: TerminalPattern,
    dbar: np.ndarray,
    graph: DirectedGraph,
    rtol: float = 1e-9,
) -> MatchResult:
    """Check whether the disturbance ``dbar`` can be matched on ``graph``.

    The residual tolerance is ``rtol * (1 + ||E d||)``. A nonzero net
    inflow is reported first since it already rules out E d in im B.

    Args:
        terminals: Terminal pattern E
        dbar: Constant in/outflow vector (length k)
        graph: Graph providing B
        rtol: Relative residual tolerance

    Returns:
        MatchResult with the minimum-norm x_c when matchable
    """
    target = terminals.inflow(graph.n, dbar)
    scale = 1.0 + float(np.linalg.norm(target))
    total = float(target.sum())
    xbar, residual = matching_state(graph, target)

    if abs(total) > rtol * scale:
        logger.info(f"Disturbance not matchable: net inflow {total:g} != 0")
        return MatchResult(
            matchable=False,
            failure="unbalanced_inflow",
            total_inflow=total,
            residual=residual,
        )
    if residual > rtol * scale:
        logger.info(f"Disturbance not matchable: residual {residual:.3e} (E d not in im B)")
        return MatchResult(
            matchable=False,
            failure="not_in_image",
            total_inflow=total,
            residual=residual,
        )
    return MatchResult(
        matchable=True,
        total_inflow=total,
        residual=residual,
        xbar_c=tuple(float(v) for v in xbar),
    )
