"""Command-line front end.

Two subcommands:

    cvxcav smooth --input FILE --q INT [--orientation ...] [--tol R]
                  [--format json|csv] [--plot FILE.svg]
    cvxcav experiment NAME --n INT --epsilon R --q INT
                  [--seeds INT | --seed INT] [--orientation ...]
                  [--format json|text]

Input for ``smooth`` is two-column CSV (x, f): UTF-8, optional header
row, '#' comment lines.  Data go to stdout, diagnostics to stderr.
JSON numbers are printed with 17 significant digits so output re-ingests
bit-faithfully.

Exit codes: 0 success, 1 usage error, 2 parse error, 3 internal error.
"""

from __future__ import annotations

import argparse
import math
import statistics
import sys

import numpy as np

from .core import DataSeries, Orientation
from .experiments import FUNCTIONS, ExperimentConfig, run_experiment
from .solver import solve, solve_best_orientation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INTERNAL = 3


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _fmt17(value: float) -> str:
    return format(float(value), ".17g")


def _json17(obj, indent: int = 0) -> str:
    """JSON with floats rendered to 17 significant digits."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{k}": {_json17(v, indent + 2)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_json17(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, float):
        return _fmt17(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def read_series(path: str) -> DataSeries:
    """Parse two-column CSV; raises ParseError with a 1-based line number."""
    xs: list[float] = []
    fs: list[float] = []
    lines_of: list[int] = []
    header_allowed = True
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.readlines()
    except OSError as exc:
        raise ParseError(0, f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(raw, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        fields = [t.strip() for t in text.split(",")]
        if len(fields) != 2:
            raise ParseError(lineno, f"expected two comma-separated fields, got {len(fields)}")
        try:
            xv, fv = float(fields[0]), float(fields[1])
        except ValueError:
            if header_allowed:
                header_allowed = False
                continue
            raise ParseError(lineno, f"non-numeric field in {text!r}") from None
        header_allowed = False
        if not (math.isfinite(xv) and math.isfinite(fv)):
            raise ParseError(lineno, "non-finite value")
        if xs and xv <= xs[-1]:
            kind = "duplicate" if xv == xs[-1] else "unsorted"
            raise ParseError(lineno, f"{kind} abscissa {fields[0]}")
        xs.append(xv)
        fs.append(fv)
        lines_of.append(lineno)
    if not xs:
        raise ParseError(len(raw), "no data rows found")
    return DataSeries(np.asarray(xs), np.asarray(fs))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvxcav", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_smooth = sub.add_parser("smooth", help="smooth a CSV series")
    p_smooth.add_argument("--input", required=True, help="two-column CSV file (x, f)")
    p_smooth.add_argument("--q", type=int, required=True, help="sign-change budget (>= 0)")
    p_smooth.add_argument(
        "--orientation",
        choices=["convex-first", "concave-first", "best"],
        default="convex-first",
    )
    p_smooth.add_argument("--tol", type=float, default=None, help="zero-price tolerance")
    p_smooth.add_argument("--format", choices=["json", "csv"], default="json")
    p_smooth.add_argument("--plot", default=None, help="write an SVG overlay to this path")

    p_exp = sub.add_parser("experiment", help="run a built-in synthetic experiment")
    p_exp.add_argument("name", choices=sorted(FUNCTIONS))
    p_exp.add_argument("--n", type=int, required=True)
    p_exp.add_argument("--epsilon", type=float, required=True)
    p_exp.add_argument("--q", type=int, default=2)
    p_exp.add_argument("--seed", type=int, default=1)
    p_exp.add_argument("--seeds", type=int, default=None, help="run seeds 1..N and report medians")
    p_exp.add_argument(
        "--orientation",
        choices=["convex-first", "concave-first", "best"],
        default="best",
    )
    p_exp.add_argument("--format", choices=["json", "text"], default="text")
    return parser


def _cmd_smooth(args) -> int:
    d = read_series(args.input)
    if args.q < 0:
        print("error: --q must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    if args.tol is not None and args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_USAGE
    if args.orientation == "best":
        approx = solve_best_orientation(d, args.q, tol=args.tol)
    else:
        approx = solve(d, args.q, Orientation.from_name(args.orientation), tol=args.tol)
    summary = approx.summary()
    if args.format == "json":
        doc = {
            "summary": summary,
            "series": {
                "x": [float(v) for v in d.x],
                "f": [float(v) for v in d.f],
                "y": [float(v) for v in approx.y],
            },
        }
        print(_json17(doc))
    else:
        print("x,f,y")
        for xv, fv, yv in zip(d.x, d.f, approx.y):
            print(f"{_fmt17(xv)},{_fmt17(fv)},{_fmt17(yv)}")
        for key in ("h", "q", "orientation", "sign_changes_used", "pieces", "joins",
                    "j_star", "certificate_size"):
            print(f"{key} = {summary[key]}", file=sys.stderr)
    if args.plot:
        from ._svg import render_svg

        with open(args.plot, "w", encoding="utf-8") as fh:
            fh.write(render_svg(d, approx))
        print(f"plot written to {args.plot}", file=sys.stderr)
    return EXIT_OK


def _median_or_none(values) -> float | None:
    vals = [v for v in values if v is not None]
    return statistics.median(vals) if vals else None


def _cmd_experiment(args) -> int:
    seeds = list(range(1, args.seeds + 1)) if args.seeds else [args.seed]
    orientation = None if args.orientation == "best" else args.orientation
    reports = []
    for seed in seeds:
        config = ExperimentConfig(
            function=args.name,
            n=args.n,
            epsilon=args.epsilon,
            seed=seed,
            q=args.q,
            orientation=orientation,
        )
        reports.append(run_experiment(config))
    if len(reports) == 1:
        report = reports[0]
        print(report.to_json() if args.format == "json" else report.to_text(), end="")
        return EXIT_OK
    per_seed = [r.to_dict() for r in reports]
    medians = {
        "h": statistics.median(r.h for r in reports),
        "P_2": _median_or_none(r.p_scores.get(2.0) for r in reports),
        "P_inf": _median_or_none(r.p_scores.get(math.inf) for r in reports),
        "max_interior_error": statistics.median(r.max_interior_error for r in reports),
        "max_end_error": statistics.median(r.max_end_error for r in reports),
    }
    if args.format == "json":
        print(_json17({"runs": per_seed, "medians": medians}))
    else:
        for r in reports:
            scores = ", ".join(
                f"P_{k} = {'undefined' if v is None else format(v, '.4f')}"
                for k, v in r.to_dict()["p_scores"].items()
            )
            print(f"seed {r.config.seed}: h = {_fmt17(r.h)}, {scores}")
        for key, value in medians.items():
            print(f"median {key} = {'undefined' if value is None else _fmt17(value)}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if args.command == "smooth":
            return _cmd_smooth(args)
        return _cmd_experiment(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # internal assertion or unexpected failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
