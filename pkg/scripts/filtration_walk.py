#!/usr/bin/env python3
"""Walk the mod-ell weight filtration along theta iterates of Delta^d.

    python3 scripts/filtration_walk.py --ell 13 --delta 2
Each theta application multiplies coefficient n by n; the filtration jumps
by ell+1 or falls back by a multiple of ell-1, and returns to its start
after ell-1 steps exactly when the progression p(ell n + c) vanishes.
"""

import argparse

from etacong import delta_power, filtration, theta, theta_fixed_point_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ell", type=int, default=5)
    ap.add_argument("--delta", type=int, default=1, dest="d")
    ap.add_argument("--iters", type=int, default=None)
    args = ap.parse_args()

    ell, d = args.ell, args.d
    iters = args.iters if args.iters is not None else ell - 1
    base = 12 * d
    horizon = (base + iters * (ell + 1)) // 12 + 3
    f = delta_power(d, horizon)
    fixed = theta_fixed_point_check(delta_power(d, 10 * ell), ell, 10 * ell)
    print(f"Delta^{d} mod {ell} (theta^{ell - 1} fixed point: {fixed})")
    nominal = base
    for i in range(iters + 1):
        omega = filtration(f, nominal, ell)
        drop = "" if omega == nominal else f"  (drop from nominal {nominal})"
        print(f"  i = {i:3d}: filtration {omega}{drop}")
        f = theta(f)
        nominal += ell + 1


if __name__ == "__main__":
    main()
