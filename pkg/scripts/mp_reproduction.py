"""Marchenko-Pastur reproduction with genuinely different covariances.

Runs GeneralL with xi = 1 and paired diagonal covariances, writes the usual
artifacts and prints the comparison against MP(1, 1).
"""
import argparse

from esdlab.ensembles import CovFamilySpec, EnsembleConfig
from esdlab.experiment import ExperimentConfig, run_experiment
from esdlab.measure import XiSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--m", type=int, default=2000)
    ap.add_argument("--amp", type=float, default=0.5)
    ap.add_argument("--trials", type=int, default=3)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--out", default="out/mp")
    args = ap.parse_args()

    ens = EnsembleConfig("general-l", XiSpec.const(1), n=args.n, m=args.m,
                         cov=CovFamilySpec("diag-paired", args.amp))
    b = 1.0
    c1 = args.m / args.n
    cfg = ExperimentConfig(ens, law=f"mp:b={b},c1={c1}", trials=args.trials, seed=args.seed,
                           out=args.out)
    print(run_experiment(cfg).to_json(), end="")


if __name__ == "__main__":
    main()
