"""alpha statistics across levels for the standard and the twisted complex structure."""

import argparse

import numpy as np

from equifocal import build_clifford, homogeneity_probe, make_J, make_Jprime


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1, help="l = 2n + 2, m = 1")
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--levels", type=float, nargs="+", default=list(np.linspace(-0.8, 0.8, 9)))
    args = ap.parse_args()
    l = 2 * args.n + 2
    system = build_clifford(1, l)
    print(f"{'level':>7} {'structure':>9} {'mean':>10} {'std':>10} {'min':>10} {'max':>10}  verdict")
    for c in args.levels:
        for J in (make_J(l), make_Jprime(args.n)):
            r = homogeneity_probe(system, J, c, args.samples, args.seed)
            print(f"{c:7.3f} {J.label.value:>9} {r.mean:10.5f} {r.std:10.2e} {r.min:10.5f} "
                  f"{r.max:10.5f}  {r.verdict}")


if __name__ == "__main__":
    main()
