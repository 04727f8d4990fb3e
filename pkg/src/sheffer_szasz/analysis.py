"""Moduli of continuity, error bounds, Korovkin reports and error sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .families import Family
from .functions import TestFunction
from .operator import DEFAULT_TOL, apply, moments_closed, support_bound

DEFAULT_GRID = 4096
FD_STEP1 = 1e-5
FD_STEP2 = 1e-3


@dataclass(frozen=True)
class ModulusEstimate:
    """Grid estimate of a modulus of continuity; never exceeds the true sup."""

    delta: float
    value: float
    grid_step: float
    lower_estimate: bool = True


@dataclass(frozen=True)
class NormSet:
    sup_f: float
    sup_f1: float
    sup_f2: float
    interval: tuple[float, float]
    method: str = "analytic"


@dataclass(frozen=True)
class BoundReport:
    kind: str  # "modulus" | "gavrea_rasa" | "steklov"
    n: int
    x: float
    inputs: dict = field(default_factory=dict)
    bound: float = 0.0
    actual_error: float = math.nan


def _grid(interval, grid: int) -> tuple[np.ndarray, float]:
    a, b = map(float, interval)
    if not b > a:
        raise ValueError(f"interval must satisfy b > a, got {interval}")
    xs = np.linspace(a, b, grid)
    return xs, (b - a) / (grid - 1)


def _values(f: Callable, xs: np.ndarray) -> np.ndarray:
    v = np.asarray(f(xs), dtype=float)
    if v.shape != xs.shape:
        v = np.broadcast_to(v, xs.shape)
    if not np.all(np.isfinite(v)):
        raise ValueError("function produced non-finite samples")
    return v


def _max_lag(delta: float, h: float) -> int:
    # tolerate delta landing on a grid multiple up to rounding
    return int(math.floor(delta / h * (1.0 + 1e-12)))


def modulus(f: Callable, delta: float, interval=(0.0, 1.0), grid: int = DEFAULT_GRID) -> ModulusEstimate:
    """max |f(x) - f(y)| over grid pairs with |x - y| <= delta."""
    if not delta > 0:
        raise ValueError("delta must be > 0")
    if grid < 64:
        raise ValueError("grid must be >= 64")
    xs, h = _grid(interval, grid)
    v = _values(f, xs)
    best = 0.0
    for m in range(1, min(_max_lag(delta, h), grid - 1) + 1):
        best = max(best, float(np.max(np.abs(v[m:] - v[:-m]))))
    return ModulusEstimate(delta, best, h)


def second_modulus(f: Callable, delta: float, interval=(0.0, 1.0), grid: int = DEFAULT_GRID) -> ModulusEstimate:
    """max |f(x + 2t) - 2 f(x + t) + f(x)| over grid x and grid steps 0 < t <= delta."""
    if not delta > 0:
        raise ValueError("delta must be > 0")
    if grid < 64:
        raise ValueError("grid must be >= 64")
    a, b = map(float, interval)
    if 2.0 * delta > (b - a) * (1.0 + 1e-12):
        raise ValueError(f"second modulus needs 2*delta <= b - a, got delta={delta} on {interval}")
    xs, h = _grid(interval, grid)
    v = _values(f, xs)
    best = 0.0
    for m in range(1, _max_lag(delta, h) + 1):
        if 2 * m > grid - 1:
            break
        d2 = v[2 * m :] - 2.0 * v[m : grid - m] + v[: grid - 2 * m]
        best = max(best, float(np.max(np.abs(d2))))
    return ModulusEstimate(delta, best, h)


def _fd1(f, xs, h):
    d = lambda s: (f(xs + s) - f(xs - s)) / (2.0 * s)  # noqa: E731
    return (4.0 * d(h / 2.0) - d(h)) / 3.0


def _fd2(f, xs, h):
    d = lambda s: (f(xs + s) - 2.0 * f(xs) + f(xs - s)) / (s * s)  # noqa: E731
    return (4.0 * d(h / 2.0) - d(h)) / 3.0


def sup_norms(f: Callable, interval=(0.0, 1.0), grid: int = 1025, analytic: bool = True) -> NormSet:
    """Sup norms of f, f', f'' on the grid.

    Uses the analytic derivatives of a TestFunction when present, else
    Richardson-extrapolated central differences.
    """
    xs, _ = _grid(interval, grid)
    v = _values(f, xs)
    if analytic and isinstance(f, TestFunction) and f.d1 is not None and f.d2 is not None:
        d1 = _values(f.d1, xs)
        d2 = _values(f.d2, xs)
        method = "analytic"
    else:
        fv = lambda u: np.asarray(f(u), dtype=float)  # noqa: E731
        d1 = _fd1(fv, xs, FD_STEP1)
        d2 = _fd2(fv, xs, FD_STEP2)
        if not (np.all(np.isfinite(d1)) and np.all(np.isfinite(d2))):
            raise ValueError("function produced non-finite samples")
        method = "finite-difference"
    return NormSet(
        float(np.max(np.abs(v))),
        float(np.max(np.abs(d1))),
        float(np.max(np.abs(d2))),
        (float(interval[0]), float(interval[1])),
        method,
    )


def _actual_error(fam: Family, f: Callable, n: int, x: float, tol: float) -> float:
    g = apply(fam, f, n, x, tol).value
    return abs(g - float(np.asarray(f(np.array([x])), dtype=float)[0]))


def modulus_lambda(fam: Family, n: int, x: float) -> float:
    """The factor under the square root of the modulus bound; equals n times the second central moment."""
    c = fam.constants
    return x * (1.0 + c.h_curvature) + (c.d2A + c.dA) / (n * c.A11)


def bound_modulus(
    fam: Family,
    f: Callable,
    n: int,
    x: float,
    delta_rule: str | float = "inv_sqrt_n",
    interval: Sequence[float] | None = None,
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> BoundReport:
    """Modulus-of-continuity bound on |G_n(f;x) - f(x)|.

    ``inv_sqrt_n``: (1 + sqrt(lambda)) w(f; n**-0.5).
    ``paper_sqrt_n``: (1 + sqrt(lambda)) w(f; sqrt(n)), as published; does not tend to 0.
    a number d: (1 + sqrt(central2) / d) w(f; d).
    The modulus is taken on ``interval`` (default: [0, B] covering the operator's samples).
    """
    lam = modulus_lambda(fam, n, x)
    central2 = moments_closed(fam, n, x).central2
    if interval is None:
        interval = (0.0, support_bound(fam, n, x, tol))
    if delta_rule == "inv_sqrt_n":
        delta = 1.0 / math.sqrt(n)
        factor = 1.0 + math.sqrt(lam)
    elif delta_rule == "paper_sqrt_n":
        delta = math.sqrt(n)
        factor = 1.0 + math.sqrt(lam)
    else:
        delta = float(delta_rule)
        if not delta > 0:
            raise ValueError("custom delta must be > 0")
        factor = 1.0 + math.sqrt(central2) / delta
    w = modulus(f, delta, interval, grid)
    return BoundReport(
        "modulus",
        n,
        x,
        {"lambda": lam, "central2": central2, "delta": delta, "delta_rule": str(delta_rule),
         "modulus": w.value, "interval": tuple(interval)},
        factor * w.value,
        _actual_error(fam, f, n, x, tol),
    )  # fmt: skip


def bound_gavrea_rasa(central2: float, norms: NormSet) -> float:
    """||f'|| sqrt(m2) + ||f''|| m2 / 2 for second central moment m2."""
    if central2 < 0:
        raise ValueError(f"second central moment must be >= 0, got {central2}")
    return norms.sup_f1 * math.sqrt(central2) + 0.5 * norms.sup_f2 * central2


def gavrea_rasa_report(
    fam: Family,
    f: Callable,
    n: int,
    x: float,
    norms: NormSet | None = None,
    tol: float = DEFAULT_TOL,
) -> BoundReport:
    """Gavrea-Rasa bound with norms on the operator's support unless given."""
    if norms is None:
        norms = sup_norms(f, (0.0, support_bound(fam, n, x, tol)))
    central2 = moments_closed(fam, n, x).central2
    return BoundReport(
        "gavrea_rasa",
        n,
        x,
        {"central2": central2, "sup_f1": norms.sup_f1, "sup_f2": norms.sup_f2,
         "norm_interval": norms.interval, "norm_method": norms.method},
        bound_gavrea_rasa(central2, norms),
        _actual_error(fam, f, n, x, tol),
    )  # fmt: skip


def bound_steklov(
    fam: Family,
    f: Callable,
    n: int,
    x: float,
    alpha: float,
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> BoundReport:
    """(2/alpha) ||f|| l^2 + 3/4 (alpha + 2 + l^2) w2(f; l) with l = central2**(1/4) on [0, alpha]."""
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    central2 = moments_closed(fam, n, x).central2
    l = central2**0.25
    if 2.0 * l > alpha:
        raise ValueError(f"l = {l:.6g} too large for the second modulus on [0, {alpha}]")
    xs, _ = _grid((0.0, alpha), grid)
    sup_f = float(np.max(np.abs(_values(f, xs))))
    w2 = second_modulus(f, l, (0.0, alpha), grid).value if l > 0 else 0.0
    bound = 2.0 / alpha * sup_f * l * l + 0.75 * (alpha + 2.0 + l * l) * w2
    return BoundReport(
        "steklov",
        n,
        x,
        {"central2": central2, "l": l, "alpha": alpha, "sup_f": sup_f, "w2": w2},
        bound,
        _actual_error(fam, f, n, x, tol),
    )


@dataclass(frozen=True)
class KorovkinRow:
    n: int
    i: int
    deviation: float
    ratio: float | None  # deviation(n) / deviation(previous n)


def korovkin_report(
    fam: Family,
    n_list: Sequence[int],
    interval=(0.0, 1.0),
    grid: int = 256,
    source: str = "closed",
    tol: float = DEFAULT_TOL,
) -> list[KorovkinRow]:
    """sup over the x-grid of |G_n(e_i; x) - x**i| for i = 0, 1, 2.

    ``source="series"`` sums the operator instead of using the closed-form moments.
    """
    a, b = interval
    xs = np.unique(np.linspace(a, b, grid))
    rows = []
    prev: dict[int, float] = {}
    for n in n_list:
        dev = [0.0, 0.0, 0.0]
        for x in xs:
            x = float(x)
            if source == "closed":
                m = moments_closed(fam, n, x)
                vals = (m.e0, m.e1, m.e2)
            elif source == "series":
                vals = tuple(apply(fam, lambda u, i=i: np.asarray(u) ** i, n, x, tol).value for i in range(3))
            else:
                raise ValueError(f"unknown source {source!r}")
            for i in range(3):
                dev[i] = max(dev[i], abs(vals[i] - x**i))
        for i in range(3):
            ratio = dev[i] / prev[i] if i in prev and prev[i] > 0 else None
            rows.append(KorovkinRow(int(n), i, dev[i], ratio))
            prev[i] = dev[i]
    return rows


@dataclass(frozen=True)
class SweepRow:
    n: int
    x: float
    value: float
    fx: float
    abs_error: float


def error_sweep(
    fam: Family,
    f: Callable,
    n_list: Sequence[int],
    interval=(0.0, 1.0),
    grid: int = 256,
    tol: float = DEFAULT_TOL,
) -> list[SweepRow]:
    """Rows ordered by (n, x) for plotting G_n f against f."""
    xs = np.unique(np.linspace(interval[0], interval[1], grid))
    fx = np.asarray(f(xs), dtype=float)
    rows = []
    for n in n_list:
        for x, fv in zip(xs.tolist(), fx.tolist()):
            g = apply(fam, f, n, x, tol).value
            rows.append(SweepRow(int(n), x, g, fv, abs(g - fv)))
    return rows
