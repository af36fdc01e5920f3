"""Minimize the Rayleigh quotient for a few parameter sets and compare with the explicit profile U.

Prints one row per (params, init): R(u*), R(U), relative gap, Euler-Lagrange
residual and fitted decay exponent, and writes the table as CSV.

    python3 scripts/compare_extremal.py [--out compare.csv] [--max-iter 3000] [--M 512]
"""

import argparse
import csv
import time

from fhslab import functionals as fn
from fhslab.optimizer import MinimizeOptions, minimize
from fhslab.params import make_params
from fhslab.profiles import Grid, candidate_extremal
from fhslab.verification import fit_decay_exponent

CASES = [(1, 2.0, 0.4, 0.0), (3, 2.0, 0.5, 0.0), (1, 2.0, 0.4, 0.3), (2, 2.0, 0.7, 0.5)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="compare_extremal.csv")
    ap.add_argument("--max-iter", type=int, default=3000)
    ap.add_argument("--M", type=int, default=512)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    grid = Grid(M=args.M)
    header = ["N", "p", "s", "alpha", "init", "R_min", "R_U", "gap", "el_residual", "decay", "decay_target",
              "converged", "iterations", "seconds"]
    rows = []
    print(" ".join(f"{h:>11s}" for h in header))
    for N, p, s, alpha in CASES:
        P = make_params(N, p, s, alpha)
        RU = fn.rayleigh_quotient(candidate_extremal(P, grid), P)
        for init in ("extremal-guess", "random"):
            t0 = time.perf_counter()
            res = minimize(P, init, MinimizeOptions(max_iter=args.max_iter, seed=args.seed), grid)
            el = fn.euler_lagrange_residual(res.profile, res.I1_estimate, P)
            row = [N, p, s, alpha, init, res.rayleigh, RU, res.rayleigh / RU - 1, el,
                   fit_decay_exponent(res.profile), P.decay_exp, res.converged, res.iterations,
                   time.perf_counter() - t0]
            rows.append(row)
            print(" ".join(f"{x:>11.5g}" if isinstance(x, float) else f"{str(x):>11s}" for x in row))
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
