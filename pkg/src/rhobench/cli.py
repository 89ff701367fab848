"""Command-line interface: run experiments, summarize, export landscapes.

Exit codes: 0 on success, 2 on configuration errors, 3 on I/O errors.
The environment variable RHOBENCH_SEED overrides the configured base seed.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import harness, metrics
from .discretize import DiscretizedProblem
from .errors import ConfigInvalid, ConfigSyntax, IoError
from .problems import make_instance


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rhobench",
        description="Benchmark optimizers on plateau-discretized test functions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a configured experiment")
    p_run.add_argument("--config", required=True, help="JSON config file")
    p_run.add_argument("--workers", type=int, default=None,
                       help="worker processes (default: logical cores)")

    p_sum = sub.add_parser("summarize", help="compute metric CSVs from results")
    p_sum.add_argument("--dir", required=True, help="results directory")
    p_sum.add_argument("--metric", required=True,
                       choices=["success", "ert", "ecdf"])
    p_sum.add_argument("--budget", default=None,
                       help="budget cross-cut(s), comma separated")
    p_sum.add_argument("--target", type=float, default=1e-8,
                       help="target delta (default 1e-8)")

    p_land = sub.add_parser("landscape", help="export a discretized landscape grid")
    p_land.add_argument("--fid", type=int, required=True)
    p_land.add_argument("--dim", type=int, required=True, choices=[1, 2])
    p_land.add_argument("--rho", required=True,
                        help="plateau size, or 'None' for the continuous function")
    p_land.add_argument("--points", type=int, default=101,
                        help="grid points per axis (default 101)")
    p_land.add_argument("--instance", type=int, default=0)
    p_land.add_argument("--out", required=True, help="output CSV path")

    sub.add_parser("targets", help="print the default 51 target values")
    return parser


def _cmd_run(args) -> int:
    cfg = harness.load_config(args.config)
    env_seed = os.environ.get("RHOBENCH_SEED")
    if env_seed is not None:
        cfg.base_seed = int(env_seed)
    summary = harness.run_experiment(cfg, workers=args.workers)
    print(f"{summary['runs']} runs ({summary['failed']} failed) -> "
          f"{summary['manifest']}")
    return 0


def _cmd_summarize(args) -> int:
    budgets = None
    if args.budget:
        budgets = [int(b) for b in str(args.budget).split(",")]
    for path in harness.summarize(args.dir, args.metric, phi=args.target,
                                  budgets=budgets):
        print(path)
    return 0


def _cmd_landscape(args) -> int:
    rho = None if args.rho.lower() == "none" else float(args.rho)
    inst = make_instance(args.fid, args.dim, args.instance)
    dp = DiscretizedProblem(inst, rho)
    grid = dp.landscape_grid(args.points)
    try:
        harness.write_landscape_csv(args.out, grid)
    except OSError as exc:
        raise IoError(f"cannot write {args.out}: {exc}") from exc
    print(args.out)
    return 0


def _cmd_targets(_args) -> int:
    for value in metrics.default_targets():
        print(repr(float(value)))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "summarize": _cmd_summarize,
        "landscape": _cmd_landscape,
        "targets": _cmd_targets,
    }
    try:
        return handlers[args.command](args)
    except (ConfigSyntax, ConfigInvalid) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (IoError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
