"""Command line entry point: ``overhead``, ``simulate`` and ``sweep``."""
from __future__ import annotations

import argparse
import logging
import sys

from .config import load_config
from .errors import ConfigError
from .harness import (SCHEMES, benchmark_overhead_nk, failure_rate, run_sweep,
                      training_overhead)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _cmd_overhead(args):
    schemes = SCHEMES if args.scheme == "all" else (args.scheme,)
    print(f"{'M':>5} {'N':>5} {'K':>5}  {'scheme':<18} {'slots':>7}")
    for scheme in schemes:
        slots = training_overhead(args.m, args.n, args.k, scheme)
        print(f"{args.m:>5} {args.n:>5} {args.k:>5}  {scheme:<18} {slots:>7}")
    if "benchmark" in schemes:
        print(f"# benchmark without direct-path training (N*K): "
              f"{benchmark_overhead_nk(args.n, args.k)}")
    return EXIT_OK


def _finish(rows, config, out):
    rate = failure_rate(rows)
    print(f"wrote {len(rows)} rows to {out} (failed-trial rate {rate:.3%})")
    if rate > config.max_failure_rate:
        print(f"error: failed-trial rate {rate:.3%} exceeds {config.max_failure_rate:.3%}",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_simulate(args):
    config = load_config(args.config)
    rows = run_sweep(config, out=args.out, workers=args.workers)
    return _finish(rows, config, args.out)


def _parse_grid(text):
    try:
        grid = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad --grid {text!r}") from None
    if not grid or grid != sorted(grid):
        raise ConfigError("--grid must be a nonempty ascending list")
    return grid


def _cmd_sweep(args):
    config = load_config(args.config)
    rows = run_sweep(config, axis=args.axis, grid=_parse_grid(args.grid), out=args.out,
                     workers=args.workers)
    return _finish(rows, config, args.out)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="irs-anchor",
        description="Anchor-assisted IRS channel estimation simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("overhead", help="print training overhead in pilot slots")
    p.add_argument("--m", type=int, required=True, help="BS antennas")
    p.add_argument("--n", type=int, required=True, help="IRS elements")
    p.add_argument("--k", type=int, required=True, help="users")
    p.add_argument("--scheme", default="all", choices=("all",) + SCHEMES)
    p.set_defaults(func=_cmd_overhead)

    p = sub.add_parser("simulate", help="run the configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="sweep M, K or the on-line pilot power")
    p.add_argument("--config", required=True)
    p.add_argument("--axis", required=True, choices=("m", "k", "p"))
    p.add_argument("--grid", required=True, help="comma-separated ascending values")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        if args.command == "overhead":
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        raise


if __name__ == "__main__":
    sys.exit(main())
