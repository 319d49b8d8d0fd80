#!/usr/bin/env python3
"""Empirical sweep for balanced congruences p_alpha(ell^v n + c) == 0.

    python3 scripts/scan_progressions.py --alpha -1 --primes 5 7 11 13 --N 1000
Survivors are evidence only; each is annotated with the two necessary
conditions (the linear offset condition mod ell and the least-residue prime
filter), which every genuine congruence must satisfy.
"""

import argparse
from fractions import Fraction

from etacong import scan_balanced


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", required=True)
    ap.add_argument("--primes", type=int, nargs="+", default=[5, 7, 11, 13])
    ap.add_argument("--v", type=int, default=1)
    ap.add_argument("--N", type=int, default=500)
    args = ap.parse_args()

    alpha = Fraction(args.alpha)
    for ell in args.primes:
        if alpha.denominator % ell == 0:
            print(f"ell = {ell}: skipped (divides the denominator)")
            continue
        hits = scan_balanced(alpha, ell, args.v, args.N)
        if not hits:
            print(f"ell = {ell}: no balanced congruence up to N = {args.N}")
            continue
        for cand in hits:
            print(f"ell = {ell}: offset {cand.offset:6d}  [{cand.label}, "
                  f"offset filter {'ok' if cand.offset_admissible else 'FAIL'}, "
                  f"prime filter {'ok' if cand.prime_admissible else 'FAIL'}]")


if __name__ == "__main__":
    main()
