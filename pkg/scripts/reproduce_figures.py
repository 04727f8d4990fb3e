"""Regenerate the convergence-figure data and gnuplot scripts.

One CSV (x, f, G_20, G_30, G_50) plus a .gp script per (family, f). Run
``gnuplot figN.gp`` inside --out-dir to render PNGs.
"""

import argparse
from pathlib import Path

from sheffer_szasz.families import builtin
from sheffer_szasz.functions import resolve
from sheffer_szasz.io import to_csv
from sheffer_szasz.tables import build_sweep, gnuplot_script

CASES = [("example1", "f1"), ("example1", "f2"), ("example2", "f1"), ("example2", "f2")]


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out-dir", type=Path, default=Path("results/figures"))
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--n", type=int, nargs="+", default=[20, 30, 50])
    args = p.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    for i, (fam_name, f_name) in enumerate(CASES, start=1):
        art = build_sweep(builtin(fam_name), resolve(f_name), args.n, (0.0, 1.0), args.grid)
        data = args.out_dir / f"fig{i}.csv"
        data.write_text(to_csv(art.header, art.rows, art.metadata), encoding="utf-8", newline="\n")
        script = gnuplot_script(data.name, art, f"fig{i}.png")
        (args.out_dir / f"fig{i}.gp").write_text(script, encoding="utf-8", newline="\n")
        errs = {
            col: max(abs(row[j] - row[1]) for row in art.rows)
            for j, col in enumerate(art.header) if col.startswith("G_")
        }  # fmt: skip
        summary = ", ".join(f"{k}: {v:.4f}" for k, v in errs.items())
        print(f"fig {i}: {fam_name}, {f_name} -> {data}  max |G_n f - f|  {summary}")


if __name__ == "__main__":
    main()
