"""Command-line entry point.

Subcommands mirror the pipeline stages; ``run-all`` chains them.
All commands share --config/--out, randomness flows from a single
--seed (overriding the config's master_seed), and scenario fan-out is
controlled with --jobs. Exit status is 0 on success and 2 on any
diagnosed failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import DEFAULT_TOML, load_config
from .errors import SimulatorError
from .pipeline import TOOL_VERSION, cmd_analyze, cmd_forecast, cmd_generate, cmd_run_all, cmd_simulate


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparesim",
        description="Spare-parts demand generation, forecasting, and inventory cost simulation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    parser.add_argument(
        "--print-defaults",
        action="store_true",
        help="print the default configuration as TOML and exit",
    )
    sub = parser.add_subparsers(dest="command")

    def add_common(p: argparse.ArgumentParser, seed: bool = False) -> None:
        p.add_argument("--config", type=Path, default=None, help="TOML config (defaults if omitted)")
        p.add_argument("--out", type=Path, required=True, help="output directory")
        p.add_argument("--jobs", type=int, default=None, help="parallel scenario workers (default: cores)")
        if seed:
            p.add_argument("--seed", type=int, default=None, help="override the config master_seed")

    p_gen = sub.add_parser("generate", help="run the demand generator over the scenario grid")
    add_common(p_gen, seed=True)

    p_fc = sub.add_parser("forecast", help="fit native forecasters; ingest external forecasts")
    add_common(p_fc)
    p_fc.add_argument("--models", default=None, help="comma-separated native model names")
    p_fc.add_argument(
        "--external",
        default=None,
        help="external forecast CSV, or a directory of <scenario_id>.csv files",
    )

    p_sim = sub.add_parser("simulate", help="run the inventory cost simulation")
    add_common(p_sim)

    p_an = sub.add_parser("analyze", help="summaries, regressions, plot data and figures")
    p_an.add_argument("--config", type=Path, default=None)
    p_an.add_argument("--out", type=Path, required=True)
    p_an.add_argument(
        "--per-series-points",
        action="store_true",
        help="regress per-series points instead of per-model scenario means",
    )

    p_all = sub.add_parser("run-all", help="generate, forecast, simulate and analyze in sequence")
    add_common(p_all, seed=True)
    p_all.add_argument("--models", default=None)
    p_all.add_argument("--external", default=None)
    p_all.add_argument("--per-series-points", action="store_true")

    return parser


def _load(args) -> "RunConfig":
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg.master_seed = args.seed
    return cfg


def _model_list(args) -> list[str] | None:
    if args.models is None:
        return None
    return [m.strip() for m in args.models.split(",") if m.strip()]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.print_defaults:
        sys.stdout.write(DEFAULT_TOML)
        return 0
    if args.command is None:
        parser.print_help()
        return 2

    try:
        if args.command == "generate":
            cmd_generate(_load(args), args.out, jobs=args.jobs)
        elif args.command == "forecast":
            cmd_forecast(
                _load(args), args.out, models=_model_list(args), external=args.external, jobs=args.jobs
            )
        elif args.command == "simulate":
            cmd_simulate(_load(args), args.out, jobs=args.jobs)
        elif args.command == "analyze":
            cmd_analyze(_load(args), args.out, per_series_points=args.per_series_points)
        elif args.command == "run-all":
            cmd_run_all(
                _load(args),
                args.out,
                models=_model_list(args),
                external=args.external,
                jobs=args.jobs,
                per_series_points=args.per_series_points,
            )
    except SimulatorError as exc:
        print(f"sparesim {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
