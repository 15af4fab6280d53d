"""Command-line front end.

Subcommands:
  run <experiment> [grid flags]   sweep an experiment, CSV to stdout or --out
  critical <ln|mw> [grid flags]   shortcut for the critical-value experiments
  verify                          run the oracle suite; exit 0 iff all pass

A JSON config file (--config) can hold any grid field; explicit flags
override it. CSV goes to stdout unless --out (or the config's output_path)
says otherwise; the run summary always goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .errors import UsageError
from .experiments import EXPERIMENTS, ExperimentConfig, emit_csv, run_experiment

_CONFIG_KEYS = {"experiment", "n_list", "s_list", "theta", "p_grid", "m", "output_path"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakrev",
        description="Reversal-protected damped GHZ correlations: experiment sweeps and checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_grid_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--n", type=int, nargs="+", default=None,
                       help="qubit counts (default depends on the experiment)")
        p.add_argument("--s", type=float, nargs="+", default=None,
                       help="weak-measurement strengths (default 0 0.3 0.5 0.7)")
        p.add_argument("--theta", type=float, default=None,
                       help="initial-state angle (default pi/2)")
        p.add_argument("--p-start", type=float, default=None)
        p.add_argument("--p-stop", type=float, default=None)
        p.add_argument("--p-step", type=float, default=None)
        p.add_argument("--m", type=int, default=None,
                       help="bipartition size (default n//2)")
        p.add_argument("--out", type=str, default=None,
                       help="CSV destination (default stdout)")
        p.add_argument("--config", type=str, default=None,
                       help="JSON file with any of the grid fields; flags win")

    run_p = sub.add_parser("run", help="run one experiment")
    run_p.add_argument("experiment", choices=EXPERIMENTS)
    add_grid_flags(run_p)

    crit_p = sub.add_parser("critical", help="critical damping curves")
    crit_p.add_argument("measure", choices=("ln", "mw"))
    add_grid_flags(crit_p)

    verify_p = sub.add_parser("verify", help="run all cross-engine checks")
    verify_p.add_argument("--out", type=str, default=None)

    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config file {path!r} must hold a JSON object")
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        raise UsageError(f"config file {path!r} has unknown keys: {', '.join(unknown)}")
    return data


def _build_config(args: argparse.Namespace, experiment: str) -> ExperimentConfig:
    file_cfg = _load_config_file(args.config) if getattr(args, "config", None) else {}

    def pick(flag_value, key, fallback):
        if flag_value is not None:
            return flag_value
        return file_cfg.get(key, fallback)

    n_list = pick(args.n, "n_list", None)
    s_list = pick(args.s, "s_list", None)
    theta = pick(args.theta, "theta", math.pi / 2.0)

    grid_file = file_cfg.get("p_grid", None)
    if grid_file is not None and (not isinstance(grid_file, (list, tuple)) or len(grid_file) != 3):
        raise UsageError(f"config p_grid must be [start, stop, step], got {grid_file!r}")
    base = tuple(grid_file) if grid_file is not None else (0.0, 1.0, 0.005)
    p_grid = (
        args.p_start if args.p_start is not None else base[0],
        args.p_stop if args.p_stop is not None else base[1],
        args.p_step if args.p_step is not None else base[2],
    )

    try:
        return ExperimentConfig(
            experiment=experiment,
            n_list=tuple(int(n) for n in n_list) if n_list is not None else None,
            s_list=tuple(float(s) for s in s_list) if s_list is not None else None,
            theta=float(theta),
            p_grid=tuple(float(x) for x in p_grid),
            m=int(args.m) if args.m is not None else file_cfg.get("m", None),
            output_path=pick(args.out, "output_path", None),
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(f"malformed configuration value: {exc}") from exc


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    try:
        if args.command == "run":
            config = _build_config(args, args.experiment)
        elif args.command == "critical":
            config = _build_config(args, f"critical_{args.measure}")
        else:  # verify
            config = ExperimentConfig(experiment="oracle_suite", output_path=args.out)

        rows, summary = run_experiment(config)
        emit_csv(rows, config.output_path if config.output_path else sys.stdout)
        print(f"# {json.dumps(summary, sort_keys=True)}", file=sys.stderr)

        if args.command == "verify":
            return 0 if summary.get("ok") else 1
        return 0
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
