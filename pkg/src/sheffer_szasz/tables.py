"""Published error-bound tables and the builders for table and figure artifacts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .analysis import bound_gavrea_rasa, sup_norms
from .families import Family
from .functions import TestFunction
from .operator import DEFAULT_TOL, apply, moments_closed

TABLE_N = (20, 30, 50)
TABLE_X = (0.2, 0.5, 0.8)

# Published bounds, kept as text so they are echoed verbatim.
PUBLISHED_BOUNDS: dict[tuple[str, str], dict[int, tuple[str, str, str]]] = {
    ("example1", "f1"): {20: ("0.0885", "0.0608", "0.2148"), 30: ("0.0600", "0.0405", "0.1600"), 50: ("0.0391", "0.0260", "0.1144")},
    ("example1", "f2"): {20: ("0.1169", "0.7025", "1.9651"), 30: ("0.0748", "0.5066", "1.4795"), 50: ("0.0462", "0.3535", "1.0728")},
    ("example2", "f1"): {20: ("0.0559", "0.0426", "0.1806"), 30: ("0.0427", "0.0317", "0.1422"), 50: ("0.0311", "0.0224", "0.1066")},
    ("example2", "f2"): {20: ("0.0647", "0.5250", "1.6273"), 30: ("0.0483", "0.4150", "1.3040"), 50: ("0.0348", "0.3133", "0.9954")},
}  # fmt: skip


def published_value(family: str, f: str, n: int, x: float) -> str | None:
    table = PUBLISHED_BOUNDS.get((family, f))
    if table is None or n not in table or x not in TABLE_X:
        return None
    return table[n][TABLE_X.index(x)]


@dataclass(frozen=True)
class TableArtifact:
    header: tuple[str, ...]
    rows: list[tuple]
    metadata: dict = field(default_factory=dict)


def build_table(
    fam: Family,
    f: TestFunction,
    n_list: Sequence[int] = TABLE_N,
    x_list: Sequence[float] = TABLE_X,
    norm_interval: tuple[float, float] = (0.0, 1.0),
    tol: float = DEFAULT_TOL,
) -> TableArtifact:
    """Gavrea-Rasa bounds with sup norms on ``norm_interval``, next to actual errors and published values."""
    norms = sup_norms(f, norm_interval)
    rows = []
    for n in sorted(n_list):
        for x in sorted(x_list):
            central2 = moments_closed(fam, n, x).central2
            bound = bound_gavrea_rasa(central2, norms)
            g = apply(fam, f, n, x, tol).value
            fx = float(np.asarray(f(np.array([x])))[0])
            rows.append((int(n), float(x), bound, abs(g - fx), published_value(fam.name, f.name, n, x)))
    meta = {
        "family": fam.name,
        "f": f.name,
        "bound": "gavrea-rasa",
        "norm_convention": f"sup norms of f' and f'' on [{norm_interval[0]!r}; {norm_interval[1]!r}] ({norms.method})",
        "sup_f1": norms.sup_f1,
        "sup_f2": norms.sup_f2,
        "tool_version": __version__,
    }
    return TableArtifact(("n", "x", "bound", "actual_error", "published_bound"), rows, meta)


def build_sweep(
    fam: Family,
    f: TestFunction,
    n_list: Sequence[int] = TABLE_N,
    interval: tuple[float, float] = (0.0, 1.0),
    grid: int = 256,
    tol: float = DEFAULT_TOL,
) -> TableArtifact:
    """Figure data: one row per x with f(x) and G_n(f; x) for each n."""
    xs = np.unique(np.linspace(interval[0], interval[1], grid))
    fx = np.asarray(f(xs), dtype=float)
    rows = []
    for x, fv in zip(xs.tolist(), fx.tolist()):
        rows.append((x, fv, *(apply(fam, f, n, x, tol).value for n in n_list)))
    header = ("x", "f", *(f"G_{n}" for n in n_list))
    meta = {"family": fam.name, "f": f.name, "tool_version": __version__}
    return TableArtifact(header, rows, meta)


def gnuplot_script(data_file: str, artifact: TableArtifact, output: str = "figure.png") -> str:
    """Plot f and every G_n column of a sweep CSV."""
    fam = artifact.metadata.get("family", "")
    fname = artifact.metadata.get("f", "f")
    lines = [
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key autotitle columnhead",
        "set terminal pngcairo size 800,600",
        f"set output '{output}'",
        f"set title 'Convergence of G_n ({fam}) to {fname}'",
        "set xlabel 'x'",
        "set ylabel 'y'",
    ]
    plots = [f"'{data_file}' using 1:2 with lines lw 2 dt 1"]
    for col in range(3, len(artifact.header) + 1):
        plots.append(f"'' using 1:{col} with lines lw 1")
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"
