"""Separable storage functions H(x) = H_1(x_1) + ... + H_n(x_n)."""

import logging
from abc import ABC, abstractmethod
from typing import Callable, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.optimize import brentq

logger = logging.getLogger(__name__)


def _bracket_root(f: Callable[[float], float], start: float = 1.0) -> Tuple[float, float]:
    """Expand [-w, w] until ``f`` changes sign (f is increasing)."""
    width = max(abs(start), 1.0)
    for _ in range(200):
        lo, hi = -width, width
        if f(lo) <= 0.0 <= f(hi):
            return lo, hi
        width *= 2.0
    raise ValueError("could not bracket a root: gradient range does not contain the target")


class Hamiltonian(ABC):
    """Separable storage function with strictly increasing gradient."""

    @abstractmethod
    def value(self, x: np.ndarray) -> np.ndarray:
        """H(x); a leading sample axis is allowed."""

    @abstractmethod
    def gradient(self, x: np.ndarray) -> np.ndarray:
        """dH/dx(x), componentwise."""

    def inverse_gradient(self, alpha: float, n: int) -> np.ndarray:
        """Solve dH_i/dx_i(x_i) = alpha for every vertex by root finding."""
        out = np.empty(n)
        for i in range(n):
            def f(s: float, i: int = i) -> float:
                return float(self.gradient(np.full(n, s))[i]) - alpha
            lo, hi = _bracket_root(f, start=alpha)
            out[i] = brentq(f, lo, hi, xtol=1e-14)
        return out


class QuadraticHamiltonian(BaseModel, Hamiltonian):
    """H(x) = sum 1/2 c_i x_i^2 with c_i > 0."""

    kind: Literal["quadratic"] = "quadratic"
    weights: Optional[Tuple[float, ...]] = Field(
        default=None, description="Per-vertex weights c_i (None = all ones)"
    )

    model_config = ConfigDict(frozen=True)

    @field_validator("weights")
    @classmethod
    def check_positive(cls, v: Optional[Tuple[float, ...]]) -> Optional[Tuple[float, ...]]:
        if v is not None and any(c <= 0 for c in v):
            raise ValueError("quadratic weights must be strictly positive")
        return v

    def _c(self, x: np.ndarray) -> Union[float, np.ndarray]:
        return 1.0 if self.weights is None else np.array(self.weights, dtype=float)

    def value(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return 0.5 * np.sum(self._c(x) * x * x, axis=-1)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self._c(x) * x

    def inverse_gradient(self, alpha: float, n: int) -> np.ndarray:
        c = np.ones(n) if self.weights is None else np.array(self.weights, dtype=float)
        return alpha / c

    @property
    def is_identity(self) -> bool:
        return self.weights is None or all(c == 1.0 for c in self.weights)


class NamedHamiltonian(BaseModel, Hamiltonian):
    """Built-in non-quadratic storage functions selectable from spec files.

    - ``quartic``: c_i (x^2/2 + x^4/4), gradient c_i (x + x^3)
    - ``logcosh``: c_i log cosh x, gradient c_i tanh x
    """

    kind: Literal["named"] = "named"
    name: Literal["quartic", "logcosh"] = Field(..., description="Storage function family")
    weights: Optional[Tuple[float, ...]] = Field(default=None, description="Per-vertex weights")

    model_config = ConfigDict(frozen=True)

    @field_validator("weights")
    @classmethod
    def check_positive(cls, v: Optional[Tuple[float, ...]]) -> Optional[Tuple[float, ...]]:
        if v is not None and any(c <= 0 for c in v):
            raise ValueError("weights must be strictly positive")
        return v

    def _c(self) -> Union[float, np.ndarray]:
        return 1.0 if self.weights is None else np.array(self.weights, dtype=float)

    def value(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.name == "quartic":
            per_vertex = 0.5 * x**2 + 0.25 * x**4
        else:
            per_vertex = np.logaddexp(x, -x) - np.log(2.0)
        return np.sum(self._c() * per_vertex, axis=-1)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.name == "quartic":
            return self._c() * (x + x**3)
        return self._c() * np.tanh(x)

    def inverse_gradient(self, alpha: float, n: int) -> np.ndarray:
        if self.name == "logcosh":
            c = np.ones(n) if self.weights is None else np.array(self.weights, dtype=float)
            ratio = alpha / c
            if np.any(np.abs(ratio) >= 1.0):
                raise ValueError(f"gradient value {alpha:g} outside the range of c tanh")
            return np.arctanh(ratio)
        return super().inverse_gradient(alpha, n)


class CustomHamiltonian(Hamiltonian):
    """User supplied value and gradient callables.

    Radial unboundedness of the resulting Lyapunov function is assumed, not
    checked.
    """

    kind = "custom"

    def __init__(
        self,
        value_fn: Callable[[np.ndarray], float],
        gradient_fn: Callable[[np.ndarray], np.ndarray],
        name: str = "custom",
    ):
        self.value_fn = value_fn
        self.gradient_fn = gradient_fn
        self.name = name
        logger.warning(
            f"Custom Hamiltonian '{name}': radial unboundedness is assumed, not verified"
        )

    def value(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return np.asarray(self.value_fn(x))
        return np.array([self.value_fn(row) for row in x])

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return np.asarray(self.gradient_fn(x), dtype=float)
        return np.array([self.gradient_fn(row) for row in x], dtype=float)


AnyHamiltonian = Union[QuadraticHamiltonian, NamedHamiltonian, CustomHamiltonian]
