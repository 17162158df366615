"""Command-line interface: run, sweep, verify, report.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical failure (with the failing invariant named on stderr).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import AdialabError, ConfigError
from .scenarios import (
    ANALYSES,
    METHODS,
    MODELS,
    ScenarioConfig,
    ScenarioReport,
    fmt,
    load_config_file,
    run_scenario,
    sweep_scenario,
    SWEEP_HEADER,
)
from .verification import run_verification


def _add_scenario_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file; flags override its keys")
    sub.add_argument("--model", choices=MODELS)
    sub.add_argument("--omega0", type=float, help="level splitting (angular units)")
    sub.add_argument("--omega", type=float, help="drive rotation frequency")
    sub.add_argument("--theta", type=float, help="tilt angle in radians")
    sub.add_argument("--samples-path", dest="samples_path", help="sampled-Hamiltonian JSON file")
    sub.add_argument("--t-end", dest="t_end", type=float, help="duration (t_start = 0)")
    sub.add_argument("--dt", type=float, help="grid step")
    sub.add_argument("--steps", type=int, help="alternative to --dt: dt = t_end / steps")
    sub.add_argument("--method", choices=METHODS)
    sub.add_argument(
        "--initial-state",
        dest="initial_state",
        help="'plus', 'minus', or comma-separated re:im pairs, e.g. '1:0,0:0'",
    )
    sub.add_argument(
        "--analyses",
        help="comma-separated subset of " + ",".join(ANALYSES),
    )
    sub.add_argument("--ratio-threshold", dest="ratio_threshold", type=float)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", default="adialab_out", help="output directory for CSVs and report")


def _parse_initial_state(text: str):
    if text in ("plus", "minus"):
        return text
    try:
        return [[float(re), float(im)] for re, im in (pair.split(":") for pair in text.split(","))]
    except ValueError as exc:
        raise ConfigError(f"cannot parse initial state {text!r}: {exc}") from exc


def _config_from_args(args) -> ScenarioConfig:
    config = load_config_file(args.config) if args.config else ScenarioConfig()
    overrides = {}
    for key in (
        "model",
        "omega0",
        "omega",
        "theta",
        "samples_path",
        "t_end",
        "method",
        "ratio_threshold",
        "seed",
    ):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if args.initial_state is not None:
        overrides["initial_state"] = _parse_initial_state(args.initial_state)
    if args.analyses is not None:
        overrides["analyses"] = tuple(a for a in args.analyses.split(",") if a)
    if args.dt is not None and args.steps is not None:
        raise ConfigError("give --dt or --steps, not both")
    if args.dt is not None:
        overrides["dt"] = args.dt
    elif args.steps is not None:
        t_end = overrides.get("t_end", config.t_end)
        if args.steps < 1:
            raise ConfigError("--steps must be >= 1")
        overrides["dt"] = t_end / args.steps
    return replace(config, **overrides).validated()


def _cmd_run(args) -> int:
    config = _config_from_args(args)
    report = run_scenario(config, out_dir=args.out)
    for line in report.summary_lines():
        print(line)
    print(f"report: {Path(args.out) / 'report.json'}")
    return 0


def _cmd_sweep(args) -> int:
    config = _config_from_args(args)
    try:
        values = [float(v) for v in args.values.split(",") if v]
    except ValueError as exc:
        raise ConfigError(f"cannot parse sweep values {args.values!r}") from exc
    rows = sweep_scenario(config, args.axis, values, out_dir=args.out)
    print(",".join(SWEEP_HEADER))
    for row in rows:
        print(",".join(fmt(row[key]) for key in SWEEP_HEADER))
    return 0


def _cmd_verify(args) -> int:
    results = run_verification(args.level)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed ({args.level})")
    return 1 if failed else 0


def _cmd_report(args) -> int:
    path = Path(args.report)
    if not path.exists():
        raise ConfigError(f"report file not found: {path}")
    report = ScenarioReport.from_json(path.read_text())
    print(f"model: {report.config['model']}")
    grid = report.grid
    print(f"grid: t_start={grid['t_start']:g} dt={grid['dt']:g} steps={grid['steps']}")
    for line in report.summary_lines():
        print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adialab",
        description=(
            "Propagate driven Hamiltonians and their duals exactly, and measure "
            "where the adiabatic approximation holds or fails."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario and write CSVs + report")
    _add_scenario_flags(run_p)
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="sweep theta or omega, one summary row per value")
    _add_scenario_flags(sweep_p)
    sweep_p.add_argument("--axis", required=True, choices=("theta", "omega"))
    sweep_p.add_argument("--values", required=True, help="comma-separated values")
    sweep_p.set_defaults(func=_cmd_sweep)

    verify_p = sub.add_parser("verify", help="run the named invariant checks")
    verify_p.add_argument("--level", choices=("fast", "full"), default="fast")
    verify_p.set_defaults(func=_cmd_verify)

    report_p = sub.add_parser("report", help="re-render a saved report.json")
    report_p.add_argument("report")
    report_p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AdialabError as exc:
        print(f"numerical failure [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
