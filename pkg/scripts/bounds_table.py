"""Focal-distance lower bounds and Thorbergsson products for rank-one spaces."""

import argparse
import math

from equifocal import focal_lower_bound, make_space
from equifocal.hopf import thorbergsson_product


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--circle-length", type=float, default=2 * math.pi)
    ap.add_argument("--max-n", type=int, default=5)
    args = ap.parse_args()
    rows = [("sphere", n) for n in range(3, 3 + args.max_n)]
    rows += [("cpn", n) for n in range(1, 1 + args.max_n)]
    rows += [("hpn", n) for n in range(1, 1 + args.max_n)]
    rows += [("cap2", None)]
    print(f"{'space':>10} {'dim':>4} {'B':>5} {'lower bound':>12} {'g(m1+m2)':>9} {'l/product':>10}")
    for kind, n in rows:
        sp = make_space(kind, n, circle_length=args.circle_length)
        prod = thorbergsson_product(sp)
        print(f"{sp.label:>10} {sp.dim:>4} {sp.beta_sup:5.2f} {focal_lower_bound(sp):12.6e} "
              f"{prod:>9} {sp.circle_length / prod:10.6f}")


if __name__ == "__main__":
    main()
