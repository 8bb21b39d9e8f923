"""Median KS distance against the limit law as n grows (fixed seeds).

Prints a small table: n, median KS over seeds, and KS * sqrt(n) as a rough
rate indicator.
"""
import argparse
import math

import numpy as np

from esdlab.ensembles import EnsembleConfig, build
from esdlab.experiment import auto_law
from esdlab.measure import XiSpec
from esdlab.metrics import ks_distance
from esdlab.spectra import eigenvalues_symmetric


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="250,500,1000,2000")
    ap.add_argument("--ratio", type=float, default=1.0, help="m/n")
    ap.add_argument("--xi", default="const:1")
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()

    print(f"{'n':>6} {'median KS':>10} {'KS*sqrt(n)':>11}")
    for n in map(int, args.sizes.split(",")):
        m = max(1, round(args.ratio * n))
        base = EnsembleConfig("general-l", XiSpec.parse(args.xi), n=n, m=m)
        law = auto_law(base)
        ks = [ks_distance(eigenvalues_symmetric(build(EnsembleConfig(
            "general-l", base.xi, n=n, m=m, seed=1000 + s))), law) for s in range(args.seeds)]
        med = float(np.median(ks))
        print(f"{n:>6} {med:>10.5f} {med * math.sqrt(n):>11.4f}")


if __name__ == "__main__":
    main()
