"""Solve every Stieltjes equation on a z-grid and report residuals and timing."""
import argparse
import time

import numpy as np

from esdlab.limits import (adjacency_general_stieltjes, effective_medium_stieltjes,
                           fixed_point_stieltjes, mp_stieltjes, shifted_semicircle_stieltjes,
                           stieltjes_violations)
from esdlab.measure import XiSpec, measure_from_xi


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=20)
    ap.add_argument("--xi", default="rademacher:0.1")
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--m", type=int, default=10000)
    args = ap.parse_args()

    lam, eta = np.meshgrid(np.linspace(-5, 5, args.points), np.geomspace(1e-2, 1e2, args.points))
    z = (lam + 1j * eta).ravel()
    mu = measure_from_xi(XiSpec.parse(args.xi), args.m, args.n)
    solvers = {
        "mp(1,1)": (lambda: mp_stieltjes(1, 1, z), ()),
        "shifted-semicircle(0,1)": (lambda: shifted_semicircle_stieltjes(0, 1, z), ()),
        "effective-medium(1)": (lambda: effective_medium_stieltjes(1, z), ()),
        f"fixed-point {mu}": (lambda: fixed_point_stieltjes(mu, 1, z), mu.xi),
        f"adjacency {mu}": (lambda: adjacency_general_stieltjes(mu, z), mu.xi),
    }
    for name, (solve, xi) in solvers.items():
        t0 = time.perf_counter()
        rep = solve()
        dt = time.perf_counter() - t0
        bad = int(np.sum(stieltjes_violations(rep.f, z, xi)))
        print(f"{name:40s} max residual {rep.max_residual:.2e}  violations {bad}  "
              f"max iterations {int(np.max(rep.iterations))}  {dt:.3f}s")


if __name__ == "__main__":
    main()
