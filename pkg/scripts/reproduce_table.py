#!/usr/bin/env python3
"""Reproduce the reservoir-capacity reference table.

Analytic values for unlimited reservoirs, long simulations otherwise; writes
the fixed-schema CSV next to the printed table.

Usage:
    python scripts/reproduce_table.py --out results/table.csv
    python scripts/reproduce_table.py --horizon 2e5 --reps 5   # quick pass
"""
import argparse
import sys

from aoi_fluid.cli import main as cli_main


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--horizon", type=float, default=1e6)
    parser.add_argument("--reps", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=str, default=None)
    return parser.parse_args()


def main() -> int:
    args = parse_args()
    argv = [
        "table1",
        "--horizon", str(args.horizon),
        "--reps", str(args.reps),
        "--seed", str(args.seed),
    ]
    if args.out is not None:
        argv += ["--out", args.out]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
