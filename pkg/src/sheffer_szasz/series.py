"""Truncated bivariate power series in the exponential convention.

A series ``f(t1, t2) = sum c[k1, k2] t1**k1 t2**k2 / (k1! k2!)`` is stored by
its coefficient array ``c``; only the triangle ``k1 + k2 <= order`` is kept.
In this convention products pick up binomial weights instead of factorials,
so stored values stay moderate even at high order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np
from numpy.polynomial import Polynomial

from .errors import NumericRangeError

DEFAULT_ORDER = 64


@lru_cache(maxsize=None)
def _binomials(order: int) -> np.ndarray:
    """Pascal triangle ``B[k, j] = C(k, j)`` as floats, zero above the diagonal."""
    b = np.zeros((order + 1, order + 1))
    for k in range(order + 1):
        for j in range(k + 1):
            b[k, j] = math.comb(k, j)
    b.setflags(write=False)
    return b


@lru_cache(maxsize=None)
def _toeplitz_index(order: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(order + 1)
    diff = k[:, None] - k[None, :]
    mask = diff >= 0
    return np.where(mask, diff, 0), mask


@lru_cache(maxsize=None)
def _triangle_mask(order: int) -> np.ndarray:
    k = np.arange(order + 1)
    m = (k[:, None] + k[None, :]) <= order
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class BiSeries:
    """Exponential-convention coefficients ``coeff[k1, k2]`` for ``k1 + k2 <= order``."""

    order: int
    coeff: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeff, dtype=float)
        if self.order < 0:
            raise ValueError("order must be non-negative")
        if c.shape != (self.order + 1, self.order + 1):
            raise ValueError(f"coefficient array must be {(self.order + 1,) * 2}, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise NumericRangeError("series coefficients must be finite")
        c[~_triangle_mask(self.order)] = 0.0
        c.setflags(write=False)
        object.__setattr__(self, "coeff", c)

    @classmethod
    def zeros(cls, order: int = DEFAULT_ORDER) -> "BiSeries":
        return cls(order, np.zeros((order + 1, order + 1)))

    @classmethod
    def constant(cls, value: float, order: int = DEFAULT_ORDER) -> "BiSeries":
        c = np.zeros((order + 1, order + 1))
        c[0, 0] = value
        return cls(order, c)

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, int], float], order: int = DEFAULT_ORDER) -> "BiSeries":
        """Build from a sparse ``{(k1, k2): c}`` map; terms beyond ``order`` are dropped."""
        c = np.zeros((order + 1, order + 1))
        for (k1, k2), value in terms.items():
            if k1 < 0 or k2 < 0:
                raise ValueError(f"negative index {(k1, k2)}")
            if k1 + k2 <= order:
                c[k1, k2] += value
        return cls(order, c)

    @classmethod
    def exp_linear(cls, a1: float, a2: float, order: int = DEFAULT_ORDER) -> "BiSeries":
        """Closed-form coefficients of ``exp(a1 t1 + a2 t2)``: ``a1**k1 * a2**k2``."""
        k = np.arange(order + 1, dtype=float)
        return cls(order, np.power(a1, k)[:, None] * np.power(a2, k)[None, :])

    def __getitem__(self, idx: tuple[int, int]) -> float:
        return float(self.coeff[idx])

    def __add__(self, other: "BiSeries") -> "BiSeries":
        _check_orders(self, other)
        return BiSeries(self.order, self.coeff + other.coeff)

    def __sub__(self, other: "BiSeries") -> "BiSeries":
        _check_orders(self, other)
        return BiSeries(self.order, self.coeff - other.coeff)

    def scale(self, factor: float) -> "BiSeries":
        return BiSeries(self.order, self.coeff * factor)

    def truncate(self, order: int) -> "BiSeries":
        """Re-express at a different order, dropping or zero-padding the triangle."""
        c = np.zeros((order + 1, order + 1))
        m = min(order, self.order) + 1
        c[:m, :m] = self.coeff[:m, :m]
        return BiSeries(order, c)

    def degree(self) -> int:
        """Highest total degree with a nonzero coefficient (-1 for the zero series)."""
        k1, k2 = np.nonzero(self.coeff)
        return int((k1 + k2).max()) if len(k1) else -1


def _check_orders(a: BiSeries, b: BiSeries) -> None:
    if a.order != b.order:
        raise ValueError(f"order mismatch: {a.order} != {b.order}")


def _conv_operators(c: np.ndarray) -> np.ndarray:
    """``T[r] @ u`` is the exponential convolution ``w[k] = sum_j C(k, j) u[j] c[r, k - j]``."""
    order = c.shape[1] - 1
    idx, mask = _toeplitz_index(order)
    return _binomials(order)[None, :, :] * np.where(mask[None, :, :], c[:, idx], 0.0)


def series_mul(a: BiSeries, b: BiSeries) -> BiSeries:
    """Cauchy product with binomial weights, truncated at the common order."""
    _check_orders(a, b)
    order = a.order
    binom = _binomials(order)
    ops = _conv_operators(b.coeff)
    out = np.zeros((order + 1, order + 1))
    for i in range(order + 1):
        # rows k1 = i..order receive C(k1, i) * expconv(a[i], b[k1 - i])
        out[i:] += binom[i:, i, None] * (ops[: order + 1 - i] @ a.coeff[i])
    return BiSeries(order, out)


def series_exp(h: BiSeries) -> BiSeries:
    """``exp(h)`` via the recurrence from ``dE/dt = E * dh/dt``.

    The first row comes from the t2-derivative, every later row from the
    t1-derivative: ``E[k1+1, :] = sum_i C(k1, i) expconv(E[i, :], h[k1-i+1, :])``.
    """
    order = h.order
    h0 = float(h.coeff[0, 0])
    try:
        e00 = math.exp(h0)
    except OverflowError:
        raise NumericRangeError(f"exp(h(0,0)) overflows for h(0,0)={h0}") from None
    if e00 == 0.0:
        raise NumericRangeError(f"exp(h(0,0)) underflows for h(0,0)={h0}")
    binom = _binomials(order)
    c = h.coeff
    out = np.zeros((order + 1, order + 1))
    out[0, 0] = e00
    for k2 in range(order):
        j = np.arange(k2 + 1)
        out[0, k2 + 1] = np.sum(binom[k2, : k2 + 1] * out[0, j] * c[0, k2 - j + 1])
    ops = _conv_operators(c[1:])  # ops[r] convolves with the t1-derivative's row r
    for k1 in range(order):
        parts = np.einsum("ikj,ij->ik", ops[k1::-1], out[: k1 + 1])
        row = binom[k1, : k1 + 1] @ parts
        row[order - k1 :] = 0.0
        out[k1 + 1] = row
    if not np.all(np.isfinite(out)):
        raise NumericRangeError("exp series overflowed")
    return BiSeries(order, out)


def series_partial(a: BiSeries, axis: int) -> BiSeries:
    """Partial derivative in t1 (axis=1) or t2 (axis=2); the order drops by one."""
    if a.order < 1:
        raise ValueError("cannot differentiate an order-0 series")
    if axis == 1:
        c = a.coeff[1:, :-1]
    elif axis == 2:
        c = a.coeff[:-1, 1:]
    else:
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    return BiSeries(a.order - 1, c)


@lru_cache(maxsize=None)
def _inv_factorials(order: int) -> np.ndarray:
    f = np.array([1.0 / math.factorial(k) if k <= 170 else 0.0 for k in range(order + 1)])
    f.setflags(write=False)
    return f


def series_eval(a: BiSeries, t1: float, t2: float, diagnostics: bool = False):
    """Sum the stored terms at ``(t1, t2)``.

    Exact for polynomials that fit inside the truncation order. With
    ``diagnostics=True`` returns ``(value, last_shell)`` where ``last_shell`` is
    the absolute contribution of the top total degree, a convergence hint for
    non-polynomial series (not a rigorous tail bound).
    """
    order = a.order
    inv = _inv_factorials(order)
    k = np.arange(order + 1)
    p1 = np.power(float(t1), k) * inv
    p2 = np.power(float(t2), k) * inv
    terms = a.coeff * p1[:, None] * p2[None, :]
    value = float(terms.sum())
    if not diagnostics:
        return value
    top = (k[:, None] + k[None, :]) == order
    return value, float(abs(terms[top].sum()))


def sheffer_table(A: BiSeries, H: BiSeries, y: float, order: int | None = None) -> np.ndarray:
    """Values ``S[k1, k2](y)`` from ``A(t) exp(y H(t))``; entries with ``k1 + k2 > order`` are 0."""
    order = A.order if order is None else order
    if A.order < order or H.order < order:
        raise ValueError(f"A and H must have order >= {order}")
    a = A.truncate(order)
    e = series_exp(H.truncate(order).scale(y))
    return np.array(series_mul(a, e).coeff)


@dataclass(frozen=True)
class XPolySeries:
    """Series whose coefficient at ``(k1, k2)`` is a polynomial in x.

    ``coeff[k1, k2, m]`` is the coefficient of ``x**m``.
    """

    order: int
    coeff: np.ndarray

    def poly(self, k1: int, k2: int) -> Polynomial:
        return Polynomial(self.coeff[k1, k2])

    def evaluate(self, x: float) -> np.ndarray:
        powers = np.power(float(x), np.arange(self.order + 1))
        return self.coeff @ powers


def sheffer_polynomials(A: BiSeries, H: BiSeries) -> XPolySeries:
    """Symbolic-in-x coefficients of ``A exp(x H)`` as polynomials.

    ``exp(x H) = sum_m x**m H**m / m!``; with ``H(0,0) = 0`` the power ``H**m``
    starts at total degree m, so the sum is finite inside the truncation.
    """
    _check_orders(A, H)
    if H.coeff[0, 0] != 0.0:
        raise ValueError("symbolic expansion needs H(0,0) = 0; S is not polynomial in x otherwise")
    order = A.order
    out = np.zeros((order + 1, order + 1, order + 1))
    power = BiSeries.constant(1.0, order)
    for m in range(order + 1):
        out[:, :, m] = series_mul(A, power).coeff / math.factorial(m)
        power = series_mul(power, H)
    return XPolySeries(order, out)
