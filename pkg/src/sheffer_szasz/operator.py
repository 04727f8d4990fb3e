"""The generalized Szász operator G_n(f; x) and its moments.

    G_n(f; x) = exp(-y H(1,1)) / A(1,1) * sum_{k1,k2} S_{k1,k2}(y) / (k1! k2!) * f((k1 + k2) / n)

with ``y = n x / 2``. The weights form a probability distribution, summed in
shells of constant ``s = k1 + k2`` (then ``k1`` ascending) until the remaining
mass drops below ``tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import EnvelopeError, FamilyValidationError, NumericRangeError
from .families import Family

DEFAULT_TOL = 1e-12
MIN_TOL = 1e-15
SHELL_CAP = 4096
LINEAR_MAX_SHELL = 170  # 171! overflows a double

_INV_FACT = np.array([1.0 / math.factorial(k) for k in range(LINEAR_MAX_SHELL + 1)])

Func = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GrowthEnvelope:
    """Assumed bound ``|f(u)| <= C (1 + u**2)`` on [0, inf)."""

    C: float
    heuristic: bool = False

    def __post_init__(self):
        if not self.C >= 0:
            raise ValueError(f"envelope constant must be >= 0, got {self.C}")


@dataclass(frozen=True)
class OperatorResult:
    value: float
    terms_used: int
    accumulated_weight: float
    tail_bound: float
    shells_evaluated: int
    envelope: GrowthEnvelope | None = None


@dataclass(frozen=True)
class MomentSet:
    e0: float
    e1: float
    e2: float
    central1: float
    central2: float


class Shell(NamedTuple):
    s: int
    k1: np.ndarray
    raw: np.ndarray  # S_{k1,k2}(y) / (k1! k2!), unnormalized
    weight: np.ndarray


def _check_capable(fam: Family) -> None:
    if not fam.operator_capable:
        msg = fam.validation.failure_message() if fam.validation else f"family {fam.name!r}"
        raise FamilyValidationError(f"{msg}; operator evaluation needs an operator-capable family")


def _check_args(n: int, x: float, tol: float) -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if not x >= 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if not tol >= MIN_TOL:
        raise ValueError(f"tol must be >= {MIN_TOL}, got {tol}")


def _log_coeff(fam: Family, k1: np.ndarray, k2: np.ndarray, y: float) -> np.ndarray:
    if fam.log_coeff is not None:
        return np.asarray(fam.log_coeff(k1, k2, y), dtype=float)
    with np.errstate(divide="ignore"):
        c = np.asarray(fam.coeff(k1, k2, y), dtype=float)
        if np.any(c < 0) or not np.all(np.isfinite(c)):
            raise NumericRangeError(f"S coefficients of {fam.name!r} overflow at y={y}")
        return np.log(c)


def shells(
    fam: Family, n: int, x: float, tol: float = DEFAULT_TOL, cap: int = SHELL_CAP, diagonal: bool = False
) -> Iterator[Shell]:
    """Weight shells in deterministic order, stopping once ``1 - accumulated <= tol``.

    With ``diagonal=True`` each shell is collapsed to one entry (``k1 = [0]``)
    using ``sum_{k1+k2=s} 1/(k1! k2!) = 2**s / s!``; only valid for families
    whose S depends on ``k1 + k2`` alone.
    """
    _check_capable(fam)
    _check_args(n, x, tol)
    if diagonal and not fam.diagonal_only:
        raise ValueError(f"family {fam.name!r} is not diagonal")
    c = fam.constants
    y = n * x / 2.0
    log_pref = -y * c.H11 - math.log(c.A11)
    pref = math.exp(log_pref) if log_pref > -700.0 else 0.0
    acc = 0.0
    for s in range(cap + 1):
        if diagonal:
            k1 = np.zeros(1, dtype=int)
            k2 = np.full(1, s)
        else:
            k1 = np.arange(s + 1)
            k2 = s - k1
        raw = None
        if s <= LINEAR_MAX_SHELL and pref > 0.0:
            with np.errstate(over="ignore", invalid="ignore"):
                coeff = np.asarray(fam.coeff(k1, k2, y), dtype=float)
                if diagonal:
                    raw = coeff * (2.0**s * _INV_FACT[s])
                else:
                    raw = coeff * _INV_FACT[k1] * _INV_FACT[k2]
                w = raw * pref
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(raw))):
                raw = None
        if raw is None:
            lc = _log_coeff(fam, k1, k2, y)
            if diagonal:
                lr = lc + s * math.log(2.0) - gammaln(s + 1)
            else:
                lr = lc - gammaln(k1 + 1) - gammaln(k2 + 1)
            with np.errstate(over="ignore"):
                raw = np.exp(lr)
                w = np.exp(lr + log_pref)
        acc += float(w.sum())
        yield Shell(s, k1, raw, w)
        if 1.0 - acc <= tol:
            return
    raise NumericRangeError(
        f"weights for {fam.name!r} at n={n}, x={x} did not reach 1-{tol:g} within {cap} shells "
        f"(accumulated {acc!r})"
    )


def weights(fam: Family, n: int, x: float, tol: float = DEFAULT_TOL, cap: int = SHELL_CAP):
    """Yield ``((k1, k2), w)`` in shell order."""
    for sh in shells(fam, n, x, tol, cap):
        for k1, w in zip(sh.k1.tolist(), sh.weight.tolist()):
            yield (k1, sh.s - k1), w


def _finish(
    total: float, acc: float, terms: int, smax: int, max_ratio: float, n: int, cap: int, env: GrowthEnvelope | None
) -> OperatorResult:
    if env is None:
        env = GrowthEnvelope(1.1 * max_ratio, heuristic=True)
    elif max_ratio > env.C * (1 + 1e-12):
        raise EnvelopeError(f"|f(u)|/(1+u^2) reached {max_ratio!r} > envelope C={env.C!r}")
    u_max = cap / n
    tail = max(0.0, 1.0 - acc) * env.C * (1.0 + u_max * u_max)
    return OperatorResult(total, terms, acc, tail, smax, env)


def apply(
    fam: Family,
    f: Func,
    n: int,
    x: float,
    tol: float = DEFAULT_TOL,
    env: GrowthEnvelope | None = None,
    fast: bool = True,
    cap: int = SHELL_CAP,
) -> OperatorResult:
    """Evaluate G_n(f; x) with a tail bound.

    ``f`` is called on numpy arrays of abscissae ``s / n``. Without an
    envelope, C is estimated as 1.1x the largest sampled ``|f(u)|/(1+u^2)``
    and flagged heuristic. ``fast`` uses the diagonal collapse when the family
    allows it.
    """
    diagonal = fast and fam.diagonal_only
    total = 0.0
    acc = 0.0
    terms = 0
    smax = 0
    max_ratio = 0.0
    for sh in shells(fam, n, x, tol, cap, diagonal=diagonal):
        u = sh.s / n
        fu = float(np.asarray(f(np.array([u])), dtype=float)[0])
        if not math.isfinite(fu):
            raise NumericRangeError(f"f({u}) is not finite")
        max_ratio = max(max_ratio, abs(fu) / (1.0 + u * u))
        mass = float(sh.weight.sum())
        total += mass * fu
        acc += mass
        terms += len(sh.weight) if not diagonal else sh.s + 1
        smax = sh.s
    return _finish(total, acc, terms, smax, max_ratio, n, cap, env)


def szasz(
    f: Func, n: int, x: float, tol: float = DEFAULT_TOL, env: GrowthEnvelope | None = None, cap: int = SHELL_CAP
) -> OperatorResult:
    """Classical Szász operator ``exp(-nx) sum_k (nx)^k / k! f(k/n)``, with the same tail contract."""
    _check_args(n, x, tol)
    lam = n * x
    total = acc = max_ratio = 0.0
    p = math.exp(-lam) if lam < 600.0 else 0.0
    for k in range(cap + 1):
        if p > 1e-280 or lam == 0.0:  # seed the recurrence only from normal floats
            p = p if k == 0 else p * lam / k
        else:
            p = float(poisson.pmf(k, lam))  # lgamma-based logs lose ~1e-12 of mass here
        u = k / n
        fu = float(np.asarray(f(np.array([u])), dtype=float)[0])
        max_ratio = max(max_ratio, abs(fu) / (1.0 + u * u))
        total += p * fu
        acc += p
        if 1.0 - acc <= tol:
            return _finish(total, acc, k + 1, k, max_ratio, n, cap, env)
    raise NumericRangeError(f"Poisson weights at n={n}, x={x} did not converge within {cap} terms")


def moments_closed(fam: Family, n: int, x: float) -> MomentSet:
    """e0, e1, e2 and the first two central moments from the (1,1)-constants."""
    _check_capable(fam)
    c = fam.constants
    e1 = x + c.dA / (n * c.A11)
    quad = (c.d2A + c.dA) / (n * n * c.A11)
    e2 = x * x + x / n * (1.0 + c.h_curvature + 2.0 * c.dA / c.A11) + quad
    central1 = c.dA / (n * c.A11)
    central2 = x / n * (1.0 + c.h_curvature) + quad
    return MomentSet(1.0, e1, e2, central1, central2)


class GeneratingSums(NamedTuple):
    s0: float
    s1: float
    s2: float


def lemma1_sums(fam: Family, n: int, x: float, tol: float = DEFAULT_TOL) -> GeneratingSums:
    """Truncated ``sum S/(k1!k2!) (k1+k2)**p`` for p = 0, 1, 2, summed from the coefficients."""
    s0 = s1 = s2 = 0.0
    for sh in shells(fam, n, x, tol):
        r = float(sh.raw.sum())
        s0 += r
        s1 += sh.s * r
        s2 += sh.s * sh.s * r
    return GeneratingSums(s0, s1, s2)


def lemma1_closed(fam: Family, n: int, x: float) -> GeneratingSums:
    """Closed forms of the three sums built from the (1,1)-constants."""
    c = fam.constants
    y = n * x / 2.0
    scale = math.exp(y * c.H11)
    nx = n * x
    s0 = c.A11
    s1 = nx * c.A11 + c.dA
    s2 = nx * nx * c.A11 + nx * (c.A11 * c.h_curvature + 2.0 * c.dA + c.A11) + c.d2A + c.dA
    return GeneratingSums(s0 * scale, s1 * scale, s2 * scale)


def diagonal_profile(fam: Family, y: float, smax: int) -> list[float]:
    """``sigma_s = sum_{k1+k2=s} S_{k1,k2}(y) / (k1! k2!)`` for s = 0..smax."""
    if not fam.diagonal_only:
        raise ValueError(f"family {fam.name!r} is not diagonal")
    out = []
    for s in range(smax + 1):
        if s <= LINEAR_MAX_SHELL:
            with np.errstate(over="ignore"):
                v = float(fam.coeff(s, 0, y)) * 2.0**s * _INV_FACT[s]
            if math.isfinite(v):
                out.append(v)
                continue
        lc = float(_log_coeff(fam, np.array([s]), np.array([0]), y)[0])
        out.append(math.exp(lc + s * math.log(2.0) - math.lgamma(s + 1)))
    return out


def support_bound(fam: Family, n: int, x: float, tol: float = DEFAULT_TOL) -> float:
    """Right end B of an interval [0, B] holding x and every sampled abscissa s/n."""
    smax = 0
    for sh in shells(fam, n, x, tol, diagonal=fam.diagonal_only):
        smax = sh.s
    return max(x, smax / n)
