"""Acceptance gate: one test, and one PASS/FAIL line, per criterion.

Run with ``pytest tests/test_acceptance.py``; the verdicts are repeated in
the "acceptance criteria" section of the terminal summary.
"""

import math
from itertools import product

import numpy as np

from sheffer_szasz.analysis import bound_modulus, error_sweep, gavrea_rasa_report, korovkin_report
from sheffer_szasz.cli import main
from sheffer_szasz.families import builtin
from sheffer_szasz.functions import E0, E1, E2, F1, F2
from sheffer_szasz.io import read_csv
from sheffer_szasz.operator import DEFAULT_TOL, apply, lemma1_closed, lemma1_sums, moments_closed, szasz, weights
from sheffer_szasz.series import BiSeries, series_exp, sheffer_table

GRID = list(product((20, 30, 50), (0.2, 0.5, 0.8)))
EXAMPLES = ("example1", "example2")

# closed-form moments of the two worked examples, typed in directly
E1_FORM = {"example1": lambda n, x: x + 2 / n, "example2": lambda n, x: x + 1 / n}
E2_FORM = {
    "example1": lambda n, x: x * x + 5 * x / n + 6 / n**2,
    "example2": lambda n, x: x * x + 3 * x / n + 1 / n**2,
}
C2_FORM = {"example1": lambda n, x: x / n + 6 / n**2, "example2": lambda n, x: x / n + 1 / n**2}

# published error-bound tables: rows n = 20, 30, 50; columns x = 0.2, 0.5, 0.8
PUBLISHED = {
    ("example1", "f1"): [["0.0885", "0.0608", "0.2148"], ["0.0600", "0.0405", "0.1600"], ["0.0391", "0.0260", "0.1144"]],
    ("example1", "f2"): [["0.1169", "0.7025", "1.9651"], ["0.0748", "0.5066", "1.4795"], ["0.0462", "0.3535", "1.0728"]],
    ("example2", "f1"): [["0.0559", "0.0426", "0.1806"], ["0.0427", "0.0317", "0.1422"], ["0.0311", "0.0224", "0.1066"]],
    ("example2", "f2"): [["0.0647", "0.5250", "1.6273"], ["0.0483", "0.4150", "1.3040"], ["0.0348", "0.3133", "0.9954"]],
}  # fmt: skip


def ordinary_exp(h: np.ndarray, order: int, terms: int = 80) -> np.ndarray:
    """exp of a polynomial in ordinary coefficients by the power sum, truncated to the triangle.

    Shares no code with the series engine: plain 2-D truncated convolution.
    """

    def mul(a, b):
        out = np.zeros_like(a)
        for i, j in zip(*np.nonzero(a)):
            out[i:, j:] += a[i, j] * b[: order + 1 - i, : order + 1 - j]
        k = np.arange(order + 1)
        out[(k[:, None] + k[None, :]) > order] = 0.0
        return out

    total = np.zeros_like(h)
    power = np.zeros_like(h)
    power[0, 0] = 1.0
    for m in range(terms):
        total += power / math.factorial(m)
        power = mul(power, h)
    return total


def test_c1_moment_reproduction(verdict):
    worst = 0.0
    for name in EXAMPLES:
        fam = builtin(name)
        for n, x in GRID:
            worst = max(worst, abs(apply(fam, E1, n, x).value - E1_FORM[name](n, x)))
            worst = max(worst, abs(apply(fam, E2, n, x).value - E2_FORM[name](n, x)))
    assert verdict("C1 moment reproduction", worst <= 1e-9, f"max |G_n e_i - closed| = {worst:.3e} (tol 1e-9)")


def test_c2_central_moments(verdict):
    closed = series = 0.0
    for name in EXAMPLES:
        fam = builtin(name)
        for n, x in GRID:
            want = C2_FORM[name](n, x)
            closed = max(closed, abs(moments_closed(fam, n, x).central2 - want))
            series = max(series, abs(apply(fam, lambda u, x=x: (u - x) ** 2, n, x).value - want))
    ok = max(closed, series) <= 1e-10
    assert verdict("C2 central moments", ok, f"closed {closed:.3e}, series {series:.3e} (tol 1e-10)")


def test_c3_szasz_reduction(verdict):
    fam = builtin("szasz")
    worst = 0.0
    for f in (E0, E1, E2, F1, F2):
        for n, x in GRID:
            worst = max(worst, abs(apply(fam, f, n, x).value - szasz(f, n, x).value))
    assert verdict("C3 Szasz reduction", worst <= 1e-10, f"max diff {worst:.3e} (tol 1e-10)")


def test_c4_generating_sums(verdict):
    worst = 0.0
    for name in EXAMPLES:
        fam = builtin(name)
        for n, x in GRID:
            for got, want in zip(lemma1_sums(fam, n, x), lemma1_closed(fam, n, x)):
                worst = max(worst, abs(got - want) / abs(want))
    assert verdict("C4 generating-function sums", worst <= 1e-8, f"max relative error {worst:.3e} (tol 1e-8)")


def test_c5_korovkin_rate(verdict):
    ratios = []
    for name in EXAMPLES:
        for r in korovkin_report(builtin(name), [20, 40, 80], (0.0, 1.0), 256):
            if r.i in (1, 2) and r.ratio is not None:
                ratios.append(r.ratio)
    xs = np.linspace(0.0, 1.0, 256)
    dev0 = max(
        abs(apply(builtin(name), E0, n, float(x)).value - 1.0) for name in EXAMPLES for n in (20, 40, 80) for x in xs
    )
    ok = all(0.45 <= q <= 0.55 for q in ratios) and len(ratios) == 8 and dev0 <= DEFAULT_TOL
    detail = f"ratios in [{min(ratios):.4f}, {max(ratios):.4f}] (need [0.45, 0.55]); i=0 deviation {dev0:.3e} (tol {DEFAULT_TOL:g})"
    assert verdict("C5 Korovkin rate", ok, detail)


def test_c6_bound_dominance(verdict):
    slack_gr = slack_mod = math.inf
    for name in EXAMPLES:
        fam = builtin(name)
        for f in (F1, F2):
            for n, x in GRID:
                gr = gavrea_rasa_report(fam, f, n, x)
                md = bound_modulus(fam, f, n, x, "inv_sqrt_n")
                slack_gr = min(slack_gr, gr.bound - gr.actual_error)
                slack_mod = min(slack_mod, md.bound - md.actual_error)
    ok = slack_gr >= 0 and slack_mod >= 0
    assert verdict("C6 bound dominance", ok, f"min slack: Gavrea-Rasa {slack_gr:.3e}, modulus {slack_mod:.3e}")


def test_c7_table_fixtures(verdict, tmp_path, capsys):
    echoed = 0
    decreasing = True
    for (name, f), table in PUBLISHED.items():
        out = tmp_path / f"{name}_{f}.csv"
        assert main(["table", "--family", name, "--f", f, "--out", str(out)]) == 0
        text = out.read_text()
        lines = [ln for ln in text.splitlines() if not ln.startswith("#")][1:]
        for row_i, n in enumerate((20, 30, 50)):
            for col_i, x in enumerate((0.2, 0.5, 0.8)):
                cell = table[row_i][col_i]
                echoed += any(ln.startswith(f"{n},{x!r},") and ln.split(",")[-1] == cell for ln in lines)
        _, header, rows = read_csv(text)
        bound = {(r[0], r[1]): r[header.index("bound")] for r in rows}
        for x in (0.2, 0.5, 0.8):
            decreasing &= bound[(20, x)] > bound[(30, x)] > bound[(50, x)]
    capsys.readouterr()
    ok = echoed == 36 and decreasing
    assert verdict("C7 table fixtures", ok, f"{echoed}/36 published cells echoed verbatim; bounds strictly decreasing in n: {decreasing}")


def test_c8_figure_data(verdict):
    results = []
    for name in EXAMPLES:
        for f in (F1, F2):
            rows = error_sweep(builtin(name), f, [20, 30, 50], (0.0, 1.0), 256)
            worst = [max(r.abs_error for r in rows if r.n == n) for n in (20, 30, 50)]
            results.append((name, f.name, worst))
    ok = all(w[0] > w[1] > w[2] for _, _, w in results)
    detail = "; ".join(f"{a}/{b}: " + " > ".join(f"{v:.4f}" for v in w) for a, b, w in results)
    assert verdict("C8 figure data", ok, detail)


def test_c9_series_oracle(verdict):
    rng = np.random.default_rng(20240615)
    worst_exp = 0.0
    for _ in range(100):
        order = int(rng.integers(1, 11))
        degree = int(rng.integers(0, min(3, order) + 1))
        k = np.arange(order + 1)
        fact = np.array([math.factorial(i) for i in k], dtype=float)
        ordinary = np.zeros((order + 1, order + 1))
        mask = (k[:, None] + k[None, :]) <= degree
        ordinary[mask] = rng.uniform(-1.0, 1.0, mask.sum())
        h = BiSeries(order, ordinary * fact[:, None] * fact[None, :])
        want = ordinary_exp(ordinary, order) * fact[:, None] * fact[None, :]
        got = series_exp(h).coeff
        tri = (k[:, None] + k[None, :]) <= order
        err, ref = np.abs(got - want)[tri], np.abs(want)[tri]
        if np.any((ref == 0) & (err != 0)):
            worst_exp = math.inf
        worst_exp = max(worst_exp, float(np.max(err[ref > 0] / ref[ref > 0])))

    worst_table = 0.0
    s = np.add.outer(np.arange(21), np.arange(21))
    inside = s <= 20
    for y in (0.0, 0.5, 1.3, 3.0):
        t1 = sheffer_table(builtin("example1").A, builtin("example1").H, y, 20)
        worst_table = max(worst_table, float(np.max(np.abs(t1 - (y + 1.0) ** s)[inside] / ((y + 1.0) ** s)[inside])))
        t2 = sheffer_table(builtin("example2").A, builtin("example2").H, y, 20)
        want2 = np.where(s > 0, s * np.power(y, np.maximum(s - 1, 0)), 0.0)
        err2 = np.abs(t2 - want2)[inside]
        ref2 = np.abs(want2)[inside]
        if np.any((ref2 == 0) & (err2 != 0)):
            worst_table = math.inf
        nz = ref2 > 0
        worst_table = max(worst_table, float(np.max(err2[nz] / ref2[nz])))
    ok = worst_exp <= 1e-10 and worst_table <= 1e-12
    detail = f"exp vs power-sum max rel {worst_exp:.3e} (tol 1e-10); closed-form tables max rel {worst_table:.3e} (tol 1e-12)"
    assert verdict("C9 series-engine oracle", ok, detail)


def test_c10_weight_stream(verdict):
    wmin, acc_lo, acc_hi = math.inf, math.inf, -math.inf
    for name in ("example1", "example2", "szasz"):
        fam = builtin(name)
        for n, x in GRID:
            ws = np.array([w for _, w in weights(fam, n, x, DEFAULT_TOL)])
            wmin = min(wmin, float(ws.min()))
            acc = float(ws.sum())
            acc_lo, acc_hi = min(acc_lo, acc), max(acc_hi, acc)
    ok = wmin >= -1e-14 and acc_lo >= 1 - DEFAULT_TOL and acc_hi <= 1 + 1e-9
    detail = f"min weight {wmin:.3e}; accumulated in [1{acc_lo - 1:+.3e}, 1{acc_hi - 1:+.3e}]"
    assert verdict("C10 weight stream", ok, detail)
