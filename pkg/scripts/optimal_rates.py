#!/usr/bin/env python3
"""Arrival rate minimizing the mean AoI, as the empty-reservoir rate varies.

Prints lambda* and the attained mean AoI for a list of mu2 values at fixed
mu1 = 1 and a chosen reservoir geometry, including the unregulated limit
mu2 = mu1 for reference.
"""
import argparse
import sys

from aoi_fluid import EmptyFeasibleRegion, ModelParams, find_optimal_lambda, sigma


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--mu2", type=float, nargs="+",
                        default=[1.0, 0.9, 0.8, 2.0 / 3.0, 0.5])
    parser.add_argument("--r-plus", dest="r_plus", type=float, default=1.0)
    parser.add_argument("--r-minus", dest="r_minus", type=float, default=4.0)
    return parser.parse_args()


def main() -> int:
    args = parse_args()
    print(f"{'mu2':>8} {'lambda*':>9} {'mean AoI':>9}")
    for mu2 in sorted(args.mu2, reverse=True):
        base = ModelParams(0.5 * mu2, 1.0, mu2, args.r_plus, args.r_minus)
        lo = sigma(base) * base.mu1 + 1e-3
        hi = mu2 - 1e-3
        try:
            lam_star, value = find_optimal_lambda(base, lo, hi)
        except (EmptyFeasibleRegion, ValueError) as exc:
            print(f"{mu2:>8.4g} {'-':>9} {'-':>9}   ({exc})")
            continue
        print(f"{mu2:>8.4g} {lam_star:>9.4f} {value:>9.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
