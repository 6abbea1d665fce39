"""Command-line entry point: ``pacomposite {analyze,simulate,riskbudget}``.

Errors are reported as a single ``error: <Type>: <message>`` line on
stderr; usage errors exit with 2, data errors with 1.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .core import WeightSpec, compare_composites, sample_correlation, standardize
from .errors import CompositeError
from .population import DEFAULT_MEAN_RHO, DEFAULT_SEED, GENERATOR, default_grid, run_sweep
from .riskbudget import RiskBudgetSpec, evaluate_budget

FIGURE_WEIGHTS = (1.0, 1.0, 1.0, 2.0, 2.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"not a comma-separated list of numbers: {text!r}") from None


def _weight_spec(args, p: int) -> WeightSpec:
    if args.weights is not None:
        spec = WeightSpec.from_weights(_floats(args.weights))
    elif args.targets is None or args.targets == "unit":
        spec = WeightSpec.unit(p)
    else:
        spec = WeightSpec(_floats(args.targets))
    if spec.p != p:
        raise UsageError(f"{spec.p} weights given for {p} indicators")
    return spec


def _grid(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, count = text.split(":")
        return float(lo), float(hi), int(count)
    except ValueError:
        raise UsageError(f"--grid expects LO:HI:COUNT, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output-dir", default=".", help="directory for output files")
    common.add_argument("--json", action="store_true", help="full-precision JSON output")
    common.add_argument("--delimiter", default=",", help="input field separator")
    common.add_argument("--header", action="store_true", help="input has a header row")

    weights = _Parser(add_help=False)
    group = weights.add_mutually_exclusive_group()
    group.add_argument("--targets", help='relative variance targets, e.g. 1,1,1,2,2, or "unit"')
    group.add_argument("--weights", help="raw weights W (targets are their squares)")

    parser = _Parser(prog="pacomposite", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    analyze = sub.add_parser("analyze", parents=[common, weights], help="compare both composites on a data file")
    analyze.add_argument("--input", required=True)
    analyze.add_argument("--report-digits", type=int, default=3)
    analyze.add_argument("--score-digits", type=int, default=4)

    simulate = sub.add_parser("simulate", parents=[common, weights], help="population sweep over sd(rho)")
    simulate.add_argument("--p", type=int, default=5)
    simulate.add_argument("--grid", default="0.01:0.23:6", help="LO:HI:COUNT target sd(rho) values")
    simulate.add_argument("--mean-rho", type=float, default=DEFAULT_MEAN_RHO)
    simulate.add_argument("--seed", type=int, default=DEFAULT_SEED)

    budget = sub.add_parser("riskbudget", parents=[common, weights], help="variance-contribution budget")
    budget.add_argument("--input", required=True)
    budget.add_argument("--labels", help="comma-separated asset labels")
    budget.add_argument("--window", type=int, help="estimation window (default: all rows)")
    budget.add_argument("--holdout", help="file with holdout rows")
    return parser


def _analyze(args) -> list[Path]:
    x = io.read_indicators(args.input, args.delimiter, args.header)
    spec = _weight_spec(args, x.shape[1])
    z = standardize(x)
    r = sample_correlation(z)
    results = compare_composites(z, r, spec)
    meta = {"targets": ",".join(repr(float(t)) for t in spec.variance_targets)}
    paths = io.write_reports(
        results, r, args.output_dir, args.json, args.report_digits, args.score_digits, meta
    )
    return list(paths.values())


def _simulate(args) -> list[Path]:
    lo, hi, count = _grid(args.grid)
    if args.targets is None and args.weights is None:
        if args.p != len(FIGURE_WEIGHTS):
            raise UsageError("--targets or --weights is required when --p is not 5")
        spec = WeightSpec.from_weights(FIGURE_WEIGHTS)
    else:
        spec = _weight_spec(args, args.p)
    grid = default_grid(args.p, lo, hi, count, args.mean_rho, args.seed)
    sweep = run_sweep(grid, spec)
    meta = {
        "seed": args.seed,
        "mean_rho": args.mean_rho,
        "generator": GENERATOR,
        "grid": args.grid,
        "assumptions": "intermediate sd(rho) values and mean_rho are defaults, not recovered values",
    }
    ext = "json" if args.json else "csv"
    path = Path(args.output_dir) / f"population_sweep_p={args.p}_seed={args.seed}.{ext}"
    return [io.write_sweep(sweep, path, args.json, meta)]


def _riskbudget(args) -> list[Path]:
    x = io.read_indicators(args.input, args.delimiter, args.header)
    p = x.shape[1]
    labels = args.labels.split(",") if args.labels else [f"asset{i + 1}" for i in range(p)]
    if len(labels) != p:
        raise UsageError(f"{len(labels)} labels given for {p} columns")
    weights = _weight_spec(args, p)
    spec = RiskBudgetSpec(tuple(labels), weights.variance_targets, args.window or x.shape[0])
    holdout = io.read_indicators(args.holdout, args.delimiter, args.header) if args.holdout else None
    report = evaluate_budget(x, spec, holdout)
    ext = "json" if args.json else "csv"
    path = Path(args.output_dir) / f"risk_budget_p={p}_n={spec.estimation_window}.{ext}"
    return [io.write_budget(report, path, args.json)]


COMMANDS = {"analyze": _analyze, "simulate": _simulate, "riskbudget": _riskbudget}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        paths = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: UsageError: {exc}", file=sys.stderr)
        return 2
    except (CompositeError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
