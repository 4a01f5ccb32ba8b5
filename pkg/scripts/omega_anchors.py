"""Omega_F and alpha at the two level-0 anchor points for m = 1, l = 2n + 2."""

import argparse

from equifocal import alpha_invariant, build_clifford, eval_F, make_Jprime, omega_F
from equifocal.hopf import anchor_points


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2, 3, 4])
    args = ap.parse_args()
    print(f"{'n':>3} {'point':>6} {'F':>12} {'Omega_F':>14} {'alpha':>10}")
    for n in args.n:
        system, J = build_clifford(1, 2 * n + 2), make_Jprime(n)
        for name, z in zip(("z", "zhat"), anchor_points(n)):
            print(f"{n:>3} {name:>6} {eval_F(system, z):12.3e} {omega_F(system, J, z):14.9f} "
                  f"{alpha_invariant(system, J, z):10.6f}")


if __name__ == "__main__":
    main()
