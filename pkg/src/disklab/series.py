"""Truncated Taylor series with complex coefficients.

A series of truncation order N stores the coefficients (a_0, ..., a_N) of a
holomorphic function on the unit disk. All operations are pure; instances are
immutable. Products (and sums) of two series truncate to the smaller of the
two operand orders, so cost stays predictable and no silent order growth
occurs.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .errors import DomainError


class TaylorSeries:
    """Truncated power series sum_{k<=N} a_k z^k."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[complex]):
        cs = tuple(complex(c) for c in coeffs)
        if not cs:
            raise DomainError("a series needs at least the constant coefficient")
        self._coeffs = cs

    @property
    def coeffs(self) -> tuple[complex, ...]:
        return self._coeffs

    @property
    def order(self) -> int:
        """Truncation order N (degree of the last stored coefficient)."""
        return len(self._coeffs) - 1

    def __repr__(self) -> str:
        return f"TaylorSeries(order={self.order}, coeffs={self._coeffs[:4]}...)"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TaylorSeries) and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def evaluate(self, z: complex) -> complex:
        """Evaluate at a point by Horner recurrence."""
        acc = 0j
        for c in reversed(self._coeffs):
            acc = acc * z + c
        return acc

    def evaluate_many(self, z: np.ndarray) -> np.ndarray:
        """Vectorized Horner evaluation on an array of points."""
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for c in reversed(self._coeffs):
            acc = acc * z + c
        return acc

    def __call__(self, z):
        if isinstance(z, np.ndarray):
            return self.evaluate_many(z)
        return self.evaluate(z)

    def derivative(self) -> "TaylorSeries":
        """Coefficient shift (k+1) a_{k+1}; order drops by one.

        The derivative of a constant is the zero series of order 0.
        """
        if self.order == 0:
            return TaylorSeries([0j])
        return TaylorSeries(
            (k + 1) * a for k, a in enumerate(self._coeffs[1:])
        )

    def antiderivative(self) -> "TaylorSeries":
        """Termwise antiderivative with zero constant; order grows by one."""
        return TaylorSeries(
            [0j] + [a / (k + 1) for k, a in enumerate(self._coeffs)]
        )

    def dilate(self, r: float) -> "TaylorSeries":
        """Radial compression z -> r z, realized as coefficients a_k r^k."""
        if not 0.0 <= r <= 1.0:
            raise DomainError(f"dilation radius must lie in [0, 1], got {r}")
        return TaylorSeries(a * r**k for k, a in enumerate(self._coeffs))

    def h2_norm_sq(self) -> float:
        """Squared Hardy-space norm sum_k |a_k|^2 (exactly summed)."""
        return math.fsum(abs(a) ** 2 for a in self._coeffs)

    def shift(self) -> "TaylorSeries":
        """Multiply by z, keeping the truncation order (top coefficient drops)."""
        return TaylorSeries((0j,) + self._coeffs[:-1])

    def scale(self, c: complex) -> "TaylorSeries":
        return TaylorSeries(c * a for a in self._coeffs)

    def __mul__(self, other: "TaylorSeries") -> "TaylorSeries":
        if not isinstance(other, TaylorSeries):
            return NotImplemented
        n = min(self.order, other.order)
        out = [0j] * (n + 1)
        for i, a in enumerate(self._coeffs[: n + 1]):
            if a == 0:
                continue
            for j in range(n + 1 - i):
                out[i + j] += a * other._coeffs[j]
        return TaylorSeries(out)

    def __add__(self, other: "TaylorSeries") -> "TaylorSeries":
        if not isinstance(other, TaylorSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return TaylorSeries(
            self._coeffs[k] + other._coeffs[k] for k in range(n + 1)
        )

    def __sub__(self, other: "TaylorSeries") -> "TaylorSeries":
        if not isinstance(other, TaylorSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return TaylorSeries(
            self._coeffs[k] - other._coeffs[k] for k in range(n + 1)
        )


def zero_series(order: int) -> TaylorSeries:
    return TaylorSeries([0j] * (order + 1))


def constant_series(value: complex, order: int) -> TaylorSeries:
    return TaylorSeries([complex(value)] + [0j] * order)


def monomial(degree: int, order: int) -> TaylorSeries:
    """The series of z^degree at the given truncation order."""
    if degree > order:
        raise DomainError("monomial degree exceeds truncation order")
    cs = [0j] * (order + 1)
    cs[degree] = 1.0 + 0j
    return TaylorSeries(cs)

def geometric_series(ratio: complex, order: int) -> TaylorSeries:
    """Truncation of 1/(1 - ratio*z), i.e. coefficients ratio^k."""
    out = [1.0 + 0j]
    for _ in range(order):
        out.append(out[-1] * ratio)
    return TaylorSeries(out)


def exp_series(g: TaylorSeries) -> TaylorSeries:
    """Formal exponential exp(g) at the same truncation order.

    Uses the standard convolution recurrence E_n = (1/n) sum_k k g_k E_{n-k},
    which only consumes coefficients of g up to order n, so truncating g
    first does not disturb the retained coefficients.
    """
    n = g.order
    e = [0j] * (n + 1)
    e[0] = complex(np.exp(g.coeffs[0]))
    for m in range(1, n + 1):
        acc = 0j
        for k in range(1, m + 1):
            acc += k * g.coeffs[k] * e[m - k]
        e[m] = acc / m
    return TaylorSeries(e)


def exp_reference(order: int) -> TaylorSeries:
    """Coefficients 1/k! of the scalar exponential (handy test function)."""
    out = [1.0 + 0j]
    for k in range(1, order + 1):
        out.append(out[-1] / k)
    return TaylorSeries(out)
