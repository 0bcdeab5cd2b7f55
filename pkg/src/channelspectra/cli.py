"""Command-line entry point.

Verbs: ``simulate`` (Monte Carlo spectra to histogram + report files),
``predict`` (exact limiting moment tables), ``compare`` (simulate +
predict + per-order tolerance check + KS where a target density exists)
and ``densities`` (density/CDF grids). Exit codes: 0 success, 1 a
comparison failed its tolerance, 2 configuration error, 3 resource guard.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .densities import DensitySpec, density_moment
from .experiment import (
    ConfigError,
    ExperimentConfig,
    LAW_NAMES,
    run_compare_command,
    run_simulate_command,
    stock_law,
    write_moment_csv,
)
from .freemoments import FixedD, GrowingD, predict_limit_moments
from .linalg import ResourceGuardError

EXIT_OK = 0
EXIT_COMPARISON_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_RESOURCE_GUARD = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="channelspectra",
        description="Simulate spectra of random quantum channels and compare "
        "against exact free-probability limit predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p):
        p.add_argument("--config", required=True, type=Path, help="YAML experiment config")
        p.add_argument("--output", required=True, type=Path, help="output directory")
        p.add_argument(
            "--threads",
            type=int,
            default=os.cpu_count() or 1,
            help="worker threads for trials (default: hardware count)",
        )
        group = p.add_mutually_exclusive_group()
        group.add_argument(
            "--dense", action="store_true", help="force the dense eigenvalue path"
        )
        group.add_argument(
            "--matfree", action="store_true", help="force the matrix-free moment path"
        )

    sim = sub.add_parser("simulate", help="run trials, write histogram.csv + report.json")
    add_run_flags(sim)

    cmp_ = sub.add_parser("compare", help="simulate, predict and check tolerances")
    add_run_flags(cmp_)

    pred = sub.add_parser("predict", help="write a CSV of predicted limit moments")
    pred.add_argument("--regime", choices=("fixed-d", "growing-d"), required=True)
    pred.add_argument("--d", type=int, default=None, help="Kraus count (fixed-d regime)")
    pred.add_argument(
        "--law",
        action="append",
        default=None,
        help=f"marginal law, one of {LAW_NAMES}; repeat for heterogeneous fixed-d",
    )
    pred.add_argument("--p-max", type=int, default=6)
    pred.add_argument("--output", required=True, type=Path)

    den = sub.add_parser("densities", help="write a CSV grid of (x, density, cdf)")
    den.add_argument(
        "--kind",
        choices=("semicircle", "kesten-mckay", "dilated-kesten-mckay"),
        required=True,
    )
    den.add_argument("--d", type=float, default=None, help="Kesten-McKay parameter")
    den.add_argument("--grid-points", type=int, default=513)
    den.add_argument("--output", required=True, type=Path)
    return parser


def _mode_override(args) -> "str | None":
    if getattr(args, "dense", False):
        return "dense"
    if getattr(args, "matfree", False):
        return "matfree"
    return None


def _cmd_simulate(args) -> int:
    config = ExperimentConfig.from_yaml(args.config)
    _, written = run_simulate_command(
        config, args.output, threads=args.threads, mode_override=_mode_override(args)
    )
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    config = ExperimentConfig.from_yaml(args.config)
    report, all_passed, written = run_compare_command(
        config, args.output, threads=args.threads, mode_override=_mode_override(args)
    )
    for row in report["comparison"]:
        verdict = "pass" if row["passed"] else "FAIL"
        print(
            f"order {row['order']}: empirical {row['empirical']:.6f} vs "
            f"predicted {row['predicted']:.6f} ({verdict})"
        )
    if "ks" in report:
        print(f"KS vs {report['ks']['target']}: {report['ks']['statistic']:.4f}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK if all_passed else EXIT_COMPARISON_FAILED


def _cmd_predict(args) -> int:
    p_max = args.p_max
    law_names = args.law or ["semicircle"]
    laws = tuple(stock_law(name) for name in law_names)
    if args.regime == "growing-d":
        regime = GrowingD(laws if len(laws) > 1 else laws[0])
    else:
        if args.d is None:
            raise ConfigError("fixed-d prediction needs --d")
        regime = FixedD(args.d, laws if len(laws) > 1 else laws[0])
    try:
        values = predict_limit_moments(regime, p_max)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    args.output.mkdir(parents=True, exist_ok=True)
    out = args.output / "predicted_moments.csv"
    tag = "growing-d" if args.regime == "growing-d" else f"fixed-d({args.d})"
    write_moment_csv(range(1, p_max + 1), values, tag, out)
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_densities(args) -> int:
    if args.grid_points < 2:
        raise ConfigError("--grid-points must be >= 2")
    try:
        spec = DensitySpec(args.kind, args.d)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    lo, hi = spec.support
    total = density_moment(spec.density, hi, 0)
    if abs(total - 1.0) > 1e-6:
        raise ConfigError(f"density does not integrate to 1: got {total!r}")
    args.output.mkdir(parents=True, exist_ok=True)
    out = args.output / "density.csv"
    lines = ["x,density,cdf"]
    step = (hi - lo) / (args.grid_points - 1)
    for k in range(args.grid_points):
        x = lo + k * step
        lines.append(f"{x!r},{spec.density(x)!r},{spec.cdf(x)!r}")
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"integral check: {total:.9f}")
    print(f"wrote {out}")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "predict": _cmd_predict,
    "densities": _cmd_densities,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except ResourceGuardError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE_GUARD


if __name__ == "__main__":
    sys.exit(main())
