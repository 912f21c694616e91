"""Command line front end.

Subcommands:
  run            execute a benchmark experiment spec and write reports
  metrics        KQ / GR grids (alpha x gamma, or stream-length studies)
  task-dump      generate a benchmark dataset and write it as CSV
  bernstein-fit  print activation polynomial coefficients, one per line

Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .activation import coeffs_to_text, fit_bernstein
from .experiment import (
    ConfigError,
    ExperimentSpec,
    emit_report,
    run_experiment,
    run_metrics_grid,
)
from .specfile import load_spec
from .tasks import gen_narma10, gen_nce, gen_sine_square, load_santa_fe

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; config errors must be 1
    def error(self, message):
        raise ConfigError(message)


def _add_common(p):
    p.add_argument("--spec", help="experiment spec file (flat key = value lines)")
    p.add_argument("--seed", type=int, help="master seed override")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--engine", help="comma-separated engine list override")
    p.add_argument("--trials", type=int, help="trial count override")
    p.add_argument("--reseed", choices=("on", "off"), help="re-seeding mode override")
    p.add_argument("--threads", type=int, help="worker threads for sweep cells")
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stochres", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a benchmark experiment")
    _add_common(p_run)

    p_met = sub.add_parser("metrics", help="run KQ/GR metric grids")
    _add_common(p_met)
    p_met.add_argument("--mode", choices=("grid", "length"), default="grid",
                       help="alpha x gamma grid or stream-length study")

    p_dump = sub.add_parser("task-dump", help="emit a generated dataset as CSV")
    p_dump.add_argument("--task", required=True,
                        choices=("narma10", "sine_square", "nce", "santa_fe"))
    p_dump.add_argument("--seed", type=int, default=0)
    p_dump.add_argument("--length", type=int, default=2000)
    p_dump.add_argument("--out", default="out")
    p_dump.add_argument("--snr-db", type=float, default=None)
    p_dump.add_argument("--santa-fe-path", default=None)

    p_fit = sub.add_parser("bernstein-fit", help="print activation coefficients")
    p_fit.add_argument("--gamma", type=float, default=2.0)
    p_fit.add_argument("--order", type=int, default=10)
    p_fit.add_argument("--method", choices=("sample", "lstsq"), default="sample")
    return parser


def _spec_from_args(args, default_task: str) -> ExperimentSpec:
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.engine:
        overrides["engines"] = tuple(e.strip() for e in args.engine.split(",") if e.strip())
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.reseed is not None:
        overrides["reseed"] = (args.reseed == "on",)
    if args.threads is not None:
        overrides["threads"] = args.threads
    spec = load_spec(args.spec, overrides, default_task=default_task)
    return spec


def _cmd_run(args) -> int:
    spec = _spec_from_args(args, default_task="narma10")
    records = run_experiment(spec)
    emit_report(records, args.out, spec=spec, make_plots=not args.no_plots)
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    default = "metrics_grid" if args.mode == "grid" else "metrics_length"
    spec = _spec_from_args(args, default_task=default)
    if spec.task not in ("metrics_grid", "metrics_length"):
        raise ConfigError("metrics command needs a metrics task")
    records = run_metrics_grid(spec)
    emit_report(records, args.out, spec=spec, make_plots=not args.no_plots)
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def _cmd_task_dump(args) -> int:
    if args.task == "narma10":
        ds = gen_narma10(args.length, seed=args.seed)
    elif args.task == "sine_square":
        ds = gen_sine_square(seed=args.seed)
    elif args.task == "nce":
        ds = gen_nce(args.length, seed=args.seed, noise_snr_db=args.snr_db)
    else:
        if not args.santa_fe_path:
            raise ConfigError("task-dump santa_fe requires --santa-fe-path")
        ds = load_santa_fe(args.santa_fe_path)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{args.task}.csv"
    ds.to_csv(csv_path)
    (out / f"{args.task}_manifest.txt").write_text(ds.manifest_block())
    print(f"wrote {csv_path}")
    return EXIT_OK


def _cmd_bernstein_fit(args) -> int:
    beta = fit_bernstein(args.gamma, args.order, args.method)
    sys.stdout.write(coeffs_to_text(beta))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "metrics":
            return _cmd_metrics(args)
        if args.command == "task-dump":
            return _cmd_task_dump(args)
        if args.command == "bernstein-fit":
            return _cmd_bernstein_fit(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except (np.linalg.LinAlgError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
