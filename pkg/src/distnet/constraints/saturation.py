"""Saturation function and its antiderivative."""

from typing import Sequence, Union

import numpy as np

from distnet.constraints.models import FlowConstraint

ArrayLike = Union[float, Sequence[float], np.ndarray]


def _bounds(constraints: Sequence[FlowConstraint]) -> tuple[np.ndarray, np.ndarray]:
    lo = np.array([c.lo for c in constraints], dtype=float)
    hi = np.array([c.hi for c in constraints], dtype=float)
    return lo, hi


def sat(z: ArrayLike, lo: ArrayLike, hi: ArrayLike) -> np.ndarray:
    """Componentwise clamp of ``z`` to [lo, hi] (broadcasting)."""
    return np.minimum(np.maximum(z, lo), hi)


def saturate(z: ArrayLike, constraints: Sequence[FlowConstraint]) -> np.ndarray:
    """Multidimensional saturation sat(z; u-, u+).

    Args:
        z: Vector with one entry per constraint
        constraints: Flow intervals

    Returns:
        Clamped vector, identical to ``z`` strictly inside the box

    Raises:
        ValueError: If ``z`` and ``constraints`` differ in length

    Example:
        >>> saturate([-3.0, 0.5], [FlowConstraint(lo=-1, hi=1)] * 2)
        array([-1. ,  0.5])
    """
    z = np.asarray(z, dtype=float)
    if z.shape[-1:] != (len(constraints),):
        raise ValueError(f"vector of length {z.shape[-1:]} for {len(constraints)} constraints")
    lo, hi = _bounds(constraints)
    return sat(z, lo, hi)


def sat_integral(z: ArrayLike, lo: ArrayLike, hi: ArrayLike) -> np.ndarray:
    """Vectorized S(z; lo, hi) = integral of sat(y; lo, hi) from 0 to z.

    With ``c = clip(y, lo, hi)`` the function ``c*y - c**2/2`` is an
    antiderivative of the saturation; S is its increment from 0 to z.
    """
    z = np.asarray(z, dtype=float)
    c = sat(z, lo, hi)
    c0 = sat(0.0, lo, hi)
    return (c * z - 0.5 * c * c) + 0.5 * c0 * c0


def sat_antiderivative(z: float, c: FlowConstraint) -> float:
    """Scalar S(z; u-, u+), convex and C^1 with derivative sat(z; u-, u+).

    Example:
        >>> sat_antiderivative(2.0, FlowConstraint(lo=-1, hi=1))
        1.5
    """
    return float(sat_integral(z, c.lo, c.hi))
