#!/usr/bin/env python3
"""Exhaustive permutation coverage of a toy LCG as n grows.

For each n, every one of the m initial registers is run through a full
shuffle and the distinct permutations are counted.  Once n! passes m the
attainable fraction collapses, which is the pigeonhole argument in
miniature.
"""

import argparse

from randaudit.audit import permutation_coverage
from randaudit.bounds import factorial
from randaudit.generators import LcgParams


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--a", type=int, default=5)
    parser.add_argument("--c", type=int, default=1)
    parser.add_argument("--m", type=int, default=256)
    parser.add_argument("--max-n", type=int, default=8)
    args = parser.parse_args()

    params = LcgParams(m=args.m, a=args.a, c=args.c)
    print(f"LCG a={params.a} c={params.c} m={params.m}")
    print(f"{'n':>2} {'n!':>12} {'distinct':>9} {'fraction':>10} {'bound':>10}")
    for n in range(1, args.max_n + 1):
        r = permutation_coverage(params, n)
        print(
            f"{n:>2} {factorial(n):>12} "
            f"{r.observed['distinct_permutations']:>9} "
            f"{r.observed['observed_fraction']:>10.4f} "
            f"{r.reference['predicted_max_fraction']:>10.4f}"
            + ("  [not full period]" if r.flags else "")
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
