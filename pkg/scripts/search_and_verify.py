#!/usr/bin/env python3
"""Search for good primes of a fractional exponent and brute-force every
emitted congruence.

    python3 scripts/search_and_verify.py --alpha 57/61 --N 300
"""

import argparse
import sys
import time
from fractions import Fraction

from etacong import search_good_congruences, verify_claim


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", required=True,
                    help='rational exponent, e.g. "57/61" or "-1"')
    ap.add_argument("--N", type=int, default=300, help="verification range")
    ap.add_argument("--lmax", type=int, default=None,
                    help="prime cap (required when no finite bound exists)")
    args = ap.parse_args()

    alpha = Fraction(args.alpha)
    started = time.perf_counter()
    result = search_good_congruences(alpha, ell_max=args.lmax)
    print(f"alpha = {result.alpha}: good-prime bound {result.bound}, "
          f"{len(result.certificates)} good primes, "
          f"{len(result.rejections)} rejected candidates "
          f"({time.perf_counter() - started:.1f}s)")
    for cert in result.certificates:
        print(f"  ell = {cert.ell:5d}  k = {cert.k:4d}  r = {cert.r}  "
              f"m = {cert.m:2d}  weight {cert.weight}")

    failures = 0
    for claim in result.claims:
        report = verify_claim(claim, args.N)
        status = "ok" if report.verified else f"FAILED {report.counterexample}"
        print(f"  {claim.describe():<60} n <= {args.N}: {status} "
              f"({report.wall_clock_s:.2f}s)")
        failures += not report.verified
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
