"""Command-line front end for Szász-type operators built on multiple Sheffer families.

Exit codes: 0 ok, 2 configuration/parse error, 3 family validation failure,
4 numeric range error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import bound_modulus, korovkin_report
from .errors import ConfigError, FamilyValidationError, NumericRangeError
from .families import Family, family_from_json, parse_family_spec
from .functions import resolve
from .io import render
from .operator import DEFAULT_TOL, apply, moments_closed
from .tables import build_sweep, build_table, gnuplot_script

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_RANGE = 0, 2, 3, 4


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("n values must be >= 1")
    return vals


def _pair(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected A,B, got {text!r}")
    return vals[0], vals[1]


def _tol(text: str) -> float:
    v = float(text)
    if not 0 < v <= 1e-3:
        raise argparse.ArgumentTypeError("tol must lie in (0, 1e-3]")
    return v


def _delta_rule(text: str):
    if text == "paper":
        return "paper_sqrt_n"
    if text == "inv-sqrt":
        return "inv_sqrt_n"
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("delta rule must be paper, inv-sqrt or a positive number") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("custom delta must be > 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--family", default="example1", help="builtin NAME or NAME:p1,p2,p3 (hermite, laguerre)")
    src.add_argument("--family-json", type=Path, help="family document with polynomial A and H")
    common.add_argument("--f", default="f1", help="f1, f2, e0, e1, e2 or a polynomial expression in x")
    common.add_argument("--n", type=_ints, default=None, help="comma-separated n values")
    common.add_argument("--x", type=_floats, default=None, help="comma-separated x values")
    common.add_argument("--interval", type=_pair, default=None, help="A,B for x grids")
    common.add_argument("--grid", type=int, default=None, help="number of grid points (>= 2)")
    common.add_argument("--tol", type=_tol, default=DEFAULT_TOL)
    common.add_argument("--norm-interval", type=_pair, default=(0.0, 1.0))
    common.add_argument("--delta-rule", type=_delta_rule, default="inv-sqrt")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("--script", type=Path, default=None, help="gnuplot script path (sweep)")

    p = argparse.ArgumentParser(prog="sheffer-szasz", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("eval", "evaluate G_n(f; x)"),
        ("moments", "closed-form and summed moments"),
        ("table", "error-bound table next to the published values"),
        ("sweep", "figure data and gnuplot script"),
        ("validate", "check the operator restrictions for a family"),
        ("korovkin", "sup deviation of G_n(e_i) from x^i"),
        ("bounds", "modulus-of-continuity bound per (n, x)"),
    ]:
        sub.add_parser(name, parents=[common], help=help_)
    return p


def _load_family(args) -> Family:
    if args.family_json is not None:
        try:
            doc = json.loads(args.family_json.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read {args.family_json}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.family_json} is not valid JSON: {exc}") from None
        return family_from_json(doc)
    return parse_family_spec(args.family)


def _x_values(args, default) -> list[float]:
    if args.x is not None:
        xs = args.x
    elif args.interval is not None:
        grid = args.grid if args.grid is not None else 256
        if grid < 2:
            raise ConfigError("grid must be >= 2")
        xs = np.unique(np.linspace(args.interval[0], args.interval[1], grid)).tolist()
    else:
        xs = list(default)
    if any(not x >= 0 for x in xs):
        raise ConfigError("x values must be >= 0")
    return xs


def _emit(args, header, rows, metadata=None) -> None:
    text = render(args.format, header, rows, metadata)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8", newline="\n")


def cmd_eval(args) -> int:
    fam = _load_family(args)
    f = resolve(args.f)
    rows = []
    for n in args.n or [20, 30, 50]:
        for x in _x_values(args, [0.2, 0.5, 0.8]):
            r = apply(fam, f, n, x, args.tol)
            rows.append((n, x, r.value, r.terms_used, r.accumulated_weight, r.tail_bound,
                         r.shells_evaluated, r.envelope.C, r.envelope.heuristic))  # fmt: skip
    header = ("n", "x", "value", "terms_used", "accumulated_weight", "tail_bound",
              "shells_evaluated", "envelope_C", "envelope_heuristic")  # fmt: skip
    _emit(args, header, rows, {"family": fam.name, "f": f.name, "tol": args.tol})
    return EXIT_OK


def cmd_moments(args) -> int:
    fam = _load_family(args)
    header = ["n", "x"]
    for name in ("e0", "e1", "e2", "central1", "central2"):
        header += [f"{name}_closed", f"{name}_series", f"{name}_diff"]
    rows = []
    for n in args.n or [20, 30, 50]:
        for x in _x_values(args, [0.2, 0.5, 0.8]):
            m = moments_closed(fam, n, x)
            closed = (m.e0, m.e1, m.e2, m.central1, m.central2)
            fns = (
                lambda u: np.ones_like(u),
                lambda u: u,
                lambda u: u * u,
                lambda u, x=x: u - x,
                lambda u, x=x: (u - x) ** 2,
            )
            row = [n, x]
            for c, fn in zip(closed, fns):
                s = apply(fam, fn, n, x, args.tol).value
                row += [c, s, s - c]
            rows.append(tuple(row))
    _emit(args, header, rows, {"family": fam.name, "tol": args.tol})
    return EXIT_OK


def cmd_table(args) -> int:
    fam = _load_family(args)
    if fam.name not in ("example1", "example2") or args.f not in ("f1", "f2"):
        raise ConfigError("table needs --family example1|example2 and --f f1|f2")
    art = build_table(
        fam, resolve(args.f), args.n or (20, 30, 50), args.x or (0.2, 0.5, 0.8), args.norm_interval, args.tol
    )
    _emit(args, art.header, art.rows, art.metadata)
    return EXIT_OK


def cmd_sweep(args) -> int:
    fam = _load_family(args)
    f = resolve(args.f)
    interval = args.interval or (0.0, 1.0)
    grid = args.grid if args.grid is not None else 256
    if grid < 2:
        raise ConfigError("grid must be >= 2")
    art = build_sweep(fam, f, args.n or (20, 30, 50), interval, grid, args.tol)
    _emit(args, art.header, art.rows, art.metadata)
    script = args.script
    if script is None and args.out is not None:
        script = args.out.with_suffix(".gp")
    if script is not None:
        data = args.out.name if args.out is not None else "data.csv"
        script.write_text(gnuplot_script(data, art, Path(data).stem + ".png"), encoding="utf-8", newline="\n")
    return EXIT_OK


def _witness_text(w) -> str:
    return ";".join(f"{k}={v!r}" for k, v in (w or {}).items())


def cmd_validate(args) -> int:
    fam = _load_family(args)
    report = fam.validation
    if report is None:
        from .families import validate_family

        report = validate_family(fam)
    d = report.as_dict()
    if args.format == "json":
        text = json.dumps(d, indent=2) + "\n"
        if args.out is None:
            sys.stdout.write(text)
        else:
            args.out.write_text(text, encoding="utf-8", newline="\n")
    else:
        rows = [
            ("operator_capable", d["operator_capable"], ""),
            ("condition_i", d["condition_i"]["ok"], _witness_text(d["condition_i"]["witness"])),
            ("condition_ii", d["condition_ii"]["ok"], _witness_text(d["condition_ii"]["witness"])),
            ("condition_iii", d["condition_iii"], ""),
        ]
        _emit(args, ("check", "result", "witness"), rows, {"family": fam.name})
    if not report.operator_capable or not fam.operator_capable:
        print(report.failure_message(), file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_korovkin(args) -> int:
    fam = _load_family(args)
    interval = args.interval or (0.0, 1.0)
    grid = args.grid if args.grid is not None else 256
    rows = [
        (r.n, r.i, r.deviation, r.ratio)
        for r in korovkin_report(fam, args.n or [20, 40, 80], interval, grid)
    ]
    _emit(args, ("n", "i", "deviation", "ratio"), rows, {"family": fam.name})
    return EXIT_OK


def cmd_bounds(args) -> int:
    fam = _load_family(args)
    f = resolve(args.f)
    rows = []
    for n in args.n or [20, 30, 50]:
        for x in _x_values(args, [0.2, 0.5, 0.8]):
            r = bound_modulus(fam, f, n, x, args.delta_rule, tol=args.tol)
            rows.append((n, x, r.inputs["delta"], r.inputs["modulus"], r.bound, r.actual_error))
    _emit(args, ("n", "x", "delta", "modulus", "bound", "actual_error"), rows,
          {"family": fam.name, "f": f.name, "delta_rule": str(args.delta_rule)})  # fmt: skip
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "moments": cmd_moments,
    "table": cmd_table,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
    "korovkin": cmd_korovkin,
    "bounds": cmd_bounds,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except FamilyValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericRangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
