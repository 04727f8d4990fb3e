"""Multiple Sheffer families: coefficient evaluators, (1,1)-constants, validation."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .errors import ConfigError
from .series import (
    DEFAULT_ORDER,
    BiSeries,
    series_eval,
    series_exp,
    series_partial,
    sheffer_table,
)

E2 = math.exp(2.0)

# y-values sampled by the positivity check; 25 = n*x/2 at n=50, x=1
DEFAULT_POSITIVITY_GRID = (0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0)
DEFAULT_KMAX = 40
CONSTANT_TOL = 1e-12
POSITIVITY_TOL = 1e-12

CONSTANT_NAMES = (
    "A11", "At1", "At2", "At1t1", "At2t2", "At1t2",
    "H11", "Ht1", "Ht2", "Ht1t1", "Ht2t2", "Ht1t2",
)  # fmt: skip


@dataclass(frozen=True)
class FamilyConstants:
    """Values of A, H and their first and second partials at (t1, t2) = (1, 1)."""

    A11: float
    At1: float
    At2: float
    At1t1: float
    At2t2: float
    At1t2: float
    H11: float
    Ht1: float
    Ht2: float
    Ht1t1: float
    Ht2t2: float
    Ht1t2: float

    @classmethod
    def from_series(cls, A: BiSeries, H: BiSeries) -> "FamilyConstants":
        """Differentiate and evaluate A, H at (1, 1); exact for polynomials within the order."""

        def at11(s: BiSeries) -> float:
            return series_eval(s, 1.0, 1.0)

        def derivs(s: BiSeries) -> list[float]:
            d1, d2 = series_partial(s, 1), series_partial(s, 2)
            return [
                at11(s), at11(d1), at11(d2),
                at11(series_partial(d1, 1)), at11(series_partial(d2, 2)), at11(series_partial(d1, 2)),
            ]  # fmt: skip

        return cls(*derivs(A), *derivs(H))

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in CONSTANT_NAMES}

    @property
    def dA(self) -> float:
        """``A_t1 + A_t2`` at (1, 1)."""
        return self.At1 + self.At2

    @property
    def d2A(self) -> float:
        """``A_t1t1 + A_t2t2 + 2 A_t1t2`` at (1, 1)."""
        return self.At1t1 + self.At2t2 + 2.0 * self.At1t2

    @property
    def h_curvature(self) -> float:
        """``(H_t1t1 + H_t2t2) / 2 + H_t1t2`` at (1, 1)."""
        return 0.5 * (self.Ht1t1 + self.Ht2t2) + self.Ht1t2


Coeff = Callable[[Any, Any, float], Any]


@dataclass(frozen=True)
class ValidationReport:
    family: str
    positivity_ok: bool
    positivity_witness: dict | None
    derivative_ok: bool
    derivative_witness: dict | None
    convergence: str = "declared"
    grid: tuple[float, ...] = ()
    kmax: int = 0

    @property
    def operator_capable(self) -> bool:
        return self.positivity_ok and self.derivative_ok

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "operator_capable": self.operator_capable,
            "condition_i": {"ok": self.positivity_ok, "witness": self.positivity_witness},
            "condition_ii": {"ok": self.derivative_ok, "witness": self.derivative_witness},
            "condition_iii": self.convergence,
            "grid": list(self.grid),
            "kmax": self.kmax,
        }

    def failure_message(self) -> str:
        parts = []
        if not self.derivative_ok:
            w = self.derivative_witness or {}
            parts.append(
                "condition (ii) violated: need A(1,1) != 0 and H_t1(1,1) = H_t2(1,1) = 1, got "
                + ", ".join(f"{k}={v!r}" for k, v in w.items())
            )
        if not self.positivity_ok:
            w = self.positivity_witness or {}
            parts.append(
                f"condition (i) violated: S_{{{w.get('k1')},{w.get('k2')}}}({w.get('y')}) = {w.get('value')!r} < 0"
            )
        return f"family {self.family!r}: " + "; ".join(parts) if parts else f"family {self.family!r}: ok"


@dataclass(frozen=True)
class Family:
    """A multiple Sheffer family ready for operator evaluation.

    ``coeff(k1, k2, y)`` returns ``S_{k1,k2}(y)`` and broadcasts over numpy
    arrays of indices. ``log_coeff``, when given, returns ``log S`` for
    positive coefficients and is used once linear-space weights overflow.
    """

    name: str
    coeff: Coeff
    constants: FamilyConstants
    diagonal_only: bool
    operator_capable: bool
    log_coeff: Coeff | None = None
    A: BiSeries | None = None
    H: BiSeries | None = None
    params: Mapping[str, float] = field(default_factory=dict)
    validation: ValidationReport | None = None
    notes: str = ""

    def S(self, k1: int, k2: int, y: float) -> float:
        return float(self.coeff(k1, k2, y))


class _TableCoeff:
    """S_{k1,k2}(y) from the series engine, one table per y, grown on demand."""

    def __init__(self, A: BiSeries, H: BiSeries, order: int = DEFAULT_ORDER):
        self._A = A
        self._H = H
        self._order = order
        self._tables: dict[float, np.ndarray] = {}
        self._lock = threading.Lock()

    def table(self, y: float, need: int) -> np.ndarray:
        y = float(y)
        with self._lock:
            t = self._tables.get(y)
            if t is None or t.shape[0] - 1 < need:
                order = max(self._order, -(-need // 16) * 16)
                t = sheffer_table(self._A.truncate(order), self._H.truncate(order), y, order)
                t.setflags(write=False)
                self._tables[y] = t
            return t

    def __call__(self, k1, k2, y):
        k1 = np.asarray(k1)
        k2 = np.asarray(k2)
        need = int(np.max(k1 + k2)) if k1.size else 0
        return self.table(y, need)[k1, k2]


def _example1_coeff(k1, k2, y):
    return np.power(y + 1.0, np.add(k1, k2))


def _example1_log(k1, k2, y):
    return np.add(k1, k2) * math.log1p(y)


def _example2_coeff(k1, k2, y):
    s = np.add(k1, k2)
    return np.where(s == 0, 0.0, s * np.power(float(y), np.maximum(s - 1, 0)))


def _example2_log(k1, k2, y):
    s = np.asarray(np.add(k1, k2))
    with np.errstate(divide="ignore", invalid="ignore"):
        logy = math.log(y) if y > 0 else -math.inf
        out = np.where(s == 0, -np.inf, np.log(np.maximum(s, 1)) + np.where(s == 1, 0.0, (s - 1) * logy))
    return out


def _szasz_coeff(k1, k2, y):
    return np.power(float(y), np.add(k1, k2))


def _szasz_log(k1, k2, y):
    s = np.asarray(np.add(k1, k2))
    logy = math.log(y) if y > 0 else -math.inf
    with np.errstate(invalid="ignore"):
        return np.where(s == 0, 0.0, s * logy)


def _diagonal_H(order: int = DEFAULT_ORDER) -> BiSeries:
    return BiSeries.from_terms({(1, 0): 1.0, (0, 1): 1.0}, order)


_APPELL_H = dict(H11=2.0, Ht1=1.0, Ht2=1.0, Ht1t1=0.0, Ht2t2=0.0, Ht1t2=0.0)


def example1() -> Family:
    """A = exp(t1 + t2), H = t1 + t2, so S_{k1,k2}(y) = (y + 1)**(k1 + k2)."""
    c = FamilyConstants(A11=E2, At1=E2, At2=E2, At1t1=E2, At2t2=E2, At1t2=E2, **_APPELL_H)
    return _with_validation(Family(
        "example1", _example1_coeff, c, diagonal_only=True, operator_capable=True,
        log_coeff=_example1_log, A=BiSeries.exp_linear(1.0, 1.0), H=_diagonal_H(),
    ))  # fmt: skip


def example2() -> Family:
    """A = H = t1 + t2, so S_{k1,k2}(y) = (k1 + k2) y**(k1 + k2 - 1).

    Indexed from (0, 0) with S_{0,0} = 0, and A(0,0) = 0 is waived: the family
    is used as published even though A has no constant term.
    """
    c = FamilyConstants(A11=2.0, At1=1.0, At2=1.0, At1t1=0.0, At2t2=0.0, At1t2=0.0, **_APPELL_H)
    return _with_validation(Family(
        "example2", _example2_coeff, c, diagonal_only=True, operator_capable=True,
        log_coeff=_example2_log, A=_diagonal_H(), H=_diagonal_H(),
        notes="A(0,0)=0 waiver",
    ))  # fmt: skip


def szasz() -> Family:
    c = FamilyConstants(A11=1.0, At1=0.0, At2=0.0, At1t1=0.0, At2t2=0.0, At1t2=0.0, **_APPELL_H)
    return _with_validation(Family(
        "szasz", _szasz_coeff, c, diagonal_only=True, operator_capable=True,
        log_coeff=_szasz_log, A=BiSeries.constant(1.0), H=_diagonal_H(),
    ))  # fmt: skip


def hermite_series(delta: float, alpha1: float, alpha2: float, order: int = DEFAULT_ORDER):
    """(A, H) for the multiple Hermite family as truncated series."""
    log_a = BiSeries.from_terms(
        {(2, 0): delta, (0, 2): delta, (1, 1): delta, (1, 0): alpha1, (0, 1): alpha2}, order
    )
    return series_exp(log_a), _diagonal_H(order).scale(delta)


def hermite(delta: float = -1.0, alpha1: float = 0.0, alpha2: float = 1.0) -> Family:
    """Multiple Hermite family; series-only (H_t1(1,1) = delta < 0 can never be 1)."""
    if not delta < 0:
        raise ConfigError(f"hermite requires delta < 0, got {delta}")
    A, H = hermite_series(delta, alpha1, alpha2)
    a11 = math.exp(2 * delta + alpha1 + alpha2)
    u1, u2 = 2 * delta + alpha1, 2 * delta + alpha2
    c = FamilyConstants(
        A11=a11, At1=a11 * u1, At2=a11 * u2,
        At1t1=a11 * (u1 * u1 + delta), At2t2=a11 * (u2 * u2 + delta), At1t2=a11 * (u1 * u2 + delta),
        H11=2 * delta, Ht1=delta, Ht2=delta, Ht1t1=0.0, Ht2t2=0.0, Ht1t2=0.0,
    )  # fmt: skip
    coeff = _TableCoeff(A, H)
    fam = Family(
        "hermite", coeff, c, diagonal_only=alpha1 == alpha2, operator_capable=False, A=A, H=H,
        params={"delta": delta, "alpha1": alpha1, "alpha2": alpha2}, notes="series-only",
    )  # fmt: skip
    return _with_validation(fam, capable_allowed=False)


def laguerre_series(alpha: float, beta1: float, beta2: float, order: int = DEFAULT_ORDER):
    """(A, H) for the multiple Laguerre family.

    ``(1 - t1 - t2)**-(alpha+1)`` has exponential coefficients ``(alpha+1)_{k1+k2}``
    (rising factorial); ``(b1 t1 + b2 t2)/(1 - t1 - t2)`` has
    ``(k1 + k2 - 1)! (b1 k1 + b2 k2)`` off the origin.
    """
    k = np.arange(order + 1)
    s = k[:, None] + k[None, :]
    rising = np.cumprod(np.concatenate([[1.0], alpha + 1.0 + np.arange(2 * order)]))
    a = rising[s]
    fact = np.array([math.factorial(max(m - 1, 0)) for m in range(2 * order + 1)], dtype=float)
    h = np.where(s == 0, 0.0, fact[s] * (beta1 * k[:, None] + beta2 * k[None, :]))
    return BiSeries(order, a), BiSeries(order, h)


def laguerre(alpha: float = 0.0, beta1: float = 1.0, beta2: float = 2.0) -> Family:
    """Multiple Laguerre family; series-only.

    (1, 1) lies outside the disc of convergence. The H-constants are the
    analytic continuation there (H_t1 = beta2, H_t2 = beta1), so condition (ii)
    would force beta1 = beta2 = 1. A-constants are real only for integer alpha
    and are NaN otherwise.
    """
    if not alpha > -1:
        raise ConfigError(f"laguerre requires alpha > -1, got {alpha}")
    if beta1 == beta2:
        raise ConfigError("laguerre requires beta1 != beta2")
    A, H = laguerre_series(alpha, beta1, beta2)
    p = alpha + 1.0
    if float(alpha).is_integer():
        sign = -1.0 if int(p) % 2 else 1.0
        a11, a1, a2 = sign, -sign * p, sign * p * (p + 1)
    else:
        a11 = a1 = a2 = math.nan
    c = FamilyConstants(
        A11=a11, At1=a1, At2=a1, At1t1=a2, At2t2=a2, At1t2=a2,
        H11=-(beta1 + beta2), Ht1=beta2, Ht2=beta1,
        Ht1t1=-2 * beta2, Ht2t2=-2 * beta1, Ht1t2=-(beta1 + beta2),
    )  # fmt: skip
    coeff = _TableCoeff(A, H)
    fam = Family(
        "laguerre", coeff, c, diagonal_only=False, operator_capable=False, A=A, H=H,
        params={"alpha": alpha, "beta1": beta1, "beta2": beta2}, notes="series-only",
    )  # fmt: skip
    return _with_validation(fam, capable_allowed=False)


BUILTINS: dict[str, Callable[..., Family]] = {
    "example1": example1,
    "example2": example2,
    "szasz": szasz,
    "hermite": hermite,
    "laguerre": laguerre,
}


def builtin(name: str, *params: float) -> Family:
    """Look up a built-in family; ``hermite``/``laguerre`` take positional parameters."""
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ConfigError(f"unknown family {name!r}; choose from {sorted(BUILTINS)}") from None
    if params and name not in ("hermite", "laguerre"):
        raise ConfigError(f"family {name!r} takes no parameters")
    if len(params) > 3:
        raise ConfigError(f"family {name!r} takes at most 3 parameters")
    return factory(*params)


def parse_family_spec(spec: str) -> Family:
    """``NAME`` or ``NAME:p1,p2,p3`` as accepted by the CLI."""
    name, _, rest = spec.partition(":")
    try:
        params = [float(p) for p in rest.split(",")] if rest else []
    except ValueError:
        raise ConfigError(f"bad family parameters in {spec!r}") from None
    return builtin(name, *params)


def validate_family(
    fam: Family,
    positivity_grid: Sequence[float] = DEFAULT_POSITIVITY_GRID,
    kmax: int = DEFAULT_KMAX,
) -> ValidationReport:
    """Check positivity of S on ``grid x [0, kmax]^2`` and the (1,1) derivative conditions.

    Positivity is sampled, never proven; the radius condition is recorded as declared.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    if not positivity_grid:
        raise ValueError("positivity grid must be nonempty")
    if any(y < 0 for y in positivity_grid):
        raise ValueError("positivity grid values must be >= 0")

    k1, k2 = np.meshgrid(np.arange(kmax + 1), np.arange(kmax + 1), indexing="ij")
    pos_witness = None
    for y in positivity_grid:
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(fam.coeff(k1, k2, y), dtype=float)
        bad = ~(vals >= -POSITIVITY_TOL)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            pos_witness = {"k1": int(i), "k2": int(j), "y": float(y), "value": float(vals[i, j])}
            break

    c = fam.constants
    der_witness = {}
    if not (math.isfinite(c.A11) and c.A11 != 0.0):
        der_witness["A11"] = c.A11
    if not abs(c.Ht1 - 1.0) <= CONSTANT_TOL:
        der_witness["Ht1"] = c.Ht1
    if not abs(c.Ht2 - 1.0) <= CONSTANT_TOL:
        der_witness["Ht2"] = c.Ht2

    return ValidationReport(
        family=fam.name,
        positivity_ok=pos_witness is None,
        positivity_witness=pos_witness,
        derivative_ok=not der_witness,
        derivative_witness=der_witness or None,
        grid=tuple(float(y) for y in positivity_grid),
        kmax=kmax,
    )


def _with_validation(fam: Family, capable_allowed: bool = True) -> Family:
    report = validate_family(fam)
    capable = capable_allowed and report.operator_capable
    return replace(fam, validation=report, operator_capable=capable)


def _detect_diagonal(coeff: Coeff, smax: int = 20, ys: Sequence[float] = (0.5, 1.7)) -> bool:
    for y in ys:
        for s in range(1, smax + 1):
            row = np.asarray(coeff(np.arange(s + 1), s - np.arange(s + 1), y), dtype=float)
            ref = row[0]
            if not np.allclose(row, ref, rtol=1e-12, atol=1e-300):
                return False
    return True


def _parse_terms(doc: Mapping, key: str) -> dict[tuple[int, int], float]:
    entries = doc.get(key)
    if not isinstance(entries, list) or not entries:
        raise ConfigError(f"family document needs a nonempty list {key!r}")
    terms: dict[tuple[int, int], float] = {}
    for entry in entries:
        if not isinstance(entry, Mapping) or set(entry) != {"k1", "k2", "c"}:
            raise ConfigError(f"{key} entries must be objects with exactly k1, k2, c: {entry!r}")
        k1, k2, c = entry["k1"], entry["k2"], entry["c"]
        if not (isinstance(k1, int) and isinstance(k2, int)) or isinstance(k1, bool) or isinstance(k2, bool):
            raise ConfigError(f"{key} indices must be integers: {entry!r}")
        if k1 < 0 or k2 < 0:
            raise ConfigError(f"{key} indices must be >= 0: {entry!r}")
        if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
            raise ConfigError(f"{key} coefficient must be a finite number: {entry!r}")
        if (k1, k2) in terms:
            raise ConfigError(f"duplicate {key} index {(k1, k2)}")
        terms[(k1, k2)] = float(c)
    return terms


def family_from_json(doc: Mapping) -> Family:
    """Build a family from polynomial A, H given as exponential-convention coefficients.

    Raises ConfigError for malformed documents and for A(0,0) = 0. Validation
    runs automatically; the result carries its report and ``operator_capable``.
    """
    if not isinstance(doc, Mapping):
        raise ConfigError("family document must be a JSON object")
    unknown = set(doc) - {"name", "A", "H", "polynomial", "description"}
    if unknown:
        raise ConfigError(f"unknown keys in family document: {sorted(unknown)}")
    if doc.get("polynomial", True) is not True:
        raise ConfigError("only polynomial A and H (finitely many coefficients) are supported")
    name = doc.get("name", "custom")
    if not isinstance(name, str):
        raise ConfigError("family name must be a string")
    a_terms = _parse_terms(doc, "A")
    h_terms = _parse_terms(doc, "H")
    if a_terms.get((0, 0), 0.0) == 0.0:
        raise ConfigError("A(0,0) = a_{0,0} must be nonzero for a multiple Sheffer family")

    degree = max(k1 + k2 for k1, k2 in [*a_terms, *h_terms])
    exact_order = degree + 2
    constants = FamilyConstants.from_series(
        BiSeries.from_terms(a_terms, exact_order), BiSeries.from_terms(h_terms, exact_order)
    )
    order = max(DEFAULT_ORDER, degree)
    A = BiSeries.from_terms(a_terms, order)
    H = BiSeries.from_terms(h_terms, order)
    coeff = _TableCoeff(A, H, order)
    fam = Family(
        name, coeff, constants, diagonal_only=_detect_diagonal(coeff), operator_capable=False, A=A, H=H
    )
    return _with_validation(fam)
