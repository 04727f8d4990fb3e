"""Regenerate the four error-bound tables next to the published values.

Writes one CSV per (family, f) into --out-dir and prints a compact
comparison. Bounds use sup norms of f', f'' on --norm-interval.
"""

import argparse
from pathlib import Path

from sheffer_szasz.families import builtin
from sheffer_szasz.functions import resolve
from sheffer_szasz.io import to_csv
from sheffer_szasz.tables import build_table

CASES = [("example1", "f1"), ("example1", "f2"), ("example2", "f1"), ("example2", "f2")]


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out-dir", type=Path, default=Path("results/tables"))
    p.add_argument("--norm-interval", type=float, nargs=2, default=(0.0, 1.0), metavar=("A", "B"))
    args = p.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    for i, (fam_name, f_name) in enumerate(CASES, start=1):
        art = build_table(builtin(fam_name), resolve(f_name), norm_interval=tuple(args.norm_interval))
        path = args.out_dir / f"table{i}_{fam_name}_{f_name}.csv"
        path.write_text(to_csv(art.header, art.rows, art.metadata), encoding="utf-8", newline="\n")
        print(f"table {i}: {fam_name}, {f_name} -> {path}")
        print(f"  {'n':>3} {'x':>4} {'bound':>10} {'actual':>10} {'published':>10}")
        for n, x, bound, actual, published in art.rows:
            print(f"  {n:>3} {x:>4} {bound:>10.4f} {actual:>10.4f} {published:>10}")


if __name__ == "__main__":
    main()
