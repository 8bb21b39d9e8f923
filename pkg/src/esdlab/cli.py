"""Command line: ``esdlab {simulate,theory,compare,validate}``."""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from . import io as esl_io
from .ensembles import CovFamilySpec, EnsembleConfig, validate_ensemble
from .experiment import (ExperimentConfig, eta_problems, resolve_law, run_experiment,
                         theory_curve, _meta)
from .limits import SolverError, parse_law
from .measure import XiSpec, measure_from_xi
from .metrics import compare

EXIT_CONFIG = 2
EXIT_SOLVER = 3

_DEFAULTS = {
    "model": None, "n": 0, "m": 0, "r": 0, "d": 0, "xi": "const:1", "cov": "isotropic",
    "law": "auto", "trials": 1, "bins": 100, "seed": 0, "eta": None, "out": "out",
}


class ConfigError(ValueError):
    def __init__(self, problems):
        super().__init__("; ".join(problems))
        self.problems = problems


def _eta(text):
    if text is None or isinstance(text, (list, tuple)):
        return tuple(text) if text else None
    return tuple(float(x) for x in str(text).split(","))


def _merged(args) -> dict:
    """Flags override the optional JSON config file, which overrides defaults."""
    values = dict(_DEFAULTS)
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text())
        unknown = set(data) - set(_DEFAULTS)
        if unknown:
            raise ConfigError([f"unknown config keys: {sorted(unknown)}"])
        values.update(data)
    for key in _DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            values[key] = val
    return values


def _ensemble(values: dict, problems: list) -> EnsembleConfig | None:
    xi = cov = None
    try:
        xi = XiSpec.parse(str(values["xi"]))
    except ValueError as exc:
        problems.append(f"--xi: {exc}")
    try:
        cov = CovFamilySpec.parse(str(values["cov"]))
    except ValueError as exc:
        problems.append(f"--cov: {exc}")
    if values["model"] is None:
        problems.append("--model is required")
    if xi is None or cov is None or values["model"] is None:
        return None
    try:
        return EnsembleConfig(values["model"], xi, n=int(values["n"]), m=int(values["m"]),
                              cov=cov, r=int(values["r"]), d=int(values["d"]),
                              seed=int(values["seed"]))
    except ValueError as exc:
        problems.extend(str(exc).split("; "))
        return None


def experiment_config(args) -> ExperimentConfig:
    values = _merged(args)
    problems: list[str] = []
    ens = _ensemble(values, problems)
    try:
        eta = _eta(values["eta"])
    except ValueError:
        problems.append(f"--eta: cannot parse {values['eta']!r}")
        eta = None
    cfg = None
    if ens is None:
        for key in ("trials", "bins"):
            if int(values[key]) < 1:
                problems.append(f"{key} must be >= 1")
        problems += eta_problems(eta)
    else:
        cfg = ExperimentConfig(ens, str(values["law"]), int(values["trials"]), int(values["bins"]),
                               int(values["seed"]), str(values["out"]), eta)
        problems.extend(cfg.problems())
        try:
            resolve_law(cfg.law, ens)
        except ValueError as exc:
            problems.append(f"--law: {exc}")
    if problems:
        raise ConfigError(problems)
    return cfg


def cmd_simulate(args) -> int:
    cfg = experiment_config(args)
    report = run_experiment(cfg)
    print(report.to_json(), end="")
    return 0


def _theory_law(args):
    if args.law in ("fixed-point", "adjacency-general"):
        measure = measure_from_xi(XiSpec.parse(args.xi), args.m, args.n)
        return parse_law(f"{args.law}:a={args.a}" if args.law == "fixed-point" else args.law,
                         measure)
    params = {"mp": {"b": args.b, "c1": args.c1}, "block-laplacian": {"c": args.c},
              "effective-medium": {"c": args.c},
              "shifted-semicircle": {"c1": args.c1, "c2": args.c2}}.get(args.law, {})
    missing = [k for k, v in params.items() if v is None]
    if missing:
        raise ConfigError([f"{args.law} needs --{k}" for k in missing])
    body = ",".join(f"{k}={v}" for k, v in params.items())
    return parse_law(f"{args.law}:{body}" if body else args.law)


def cmd_theory(args) -> int:
    law = _theory_law(args)
    lam = None
    if args.grid:
        lo, hi, count = args.grid.split(",")
        lam = np.linspace(float(lo), float(hi), int(count))
    out = Path(args.out)
    spec = json.dumps({"law": str(law), "grid": args.grid, "eta": args.eta}, sort_keys=True)
    meta = {"law": str(law), **_meta(hashlib.sha256(spec.encode()).hexdigest(), 0)}
    result = theory_curve(law, lam, _eta(args.eta), out, meta)
    if args.trace is not None:
        z = result.lam + 1j * args.trace
        esl_io.write_stieltjes_trace(out / "stieltjes_trace.csv", z, law.stieltjes(z), meta)
    print(json.dumps({"law": str(law), "atoms": result.atoms, "partial": not result.ok,
                      "out": str(out)}, sort_keys=True))
    return 0 if result.ok else EXIT_SOLVER


def cmd_compare(args) -> int:
    eigs = esl_io.read_eigs(args.eigs)
    measure = None
    if args.xi and args.n and args.m:
        measure = measure_from_xi(XiSpec.parse(args.xi), args.m, args.n)
    if args.law == "auto":
        values = _merged(args)
        problems: list[str] = []
        ens = _ensemble(values, problems)
        if problems:
            raise ConfigError(problems)
        law = resolve_law("auto", ens)
    else:
        law = parse_law(args.law, measure)
    report = compare(eigs, law, args.moments, seed=args.seed or 0)
    spec = json.dumps({"law": str(law), "eigs": str(args.eigs)}, sort_keys=True)
    report.extra = {**_meta(hashlib.sha256(spec.encode()).hexdigest(), args.seed or 0),
                    "source": str(args.eigs)}
    text = report.to_json()
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "report.json").write_text(text)
    print(text, end="")
    return 0


def cmd_validate(args) -> int:
    values = _merged(args)
    problems: list[str] = []
    ens = _ensemble(values, problems)
    if problems:
        raise ConfigError(problems)
    diag = validate_ensemble(ens)
    print(json.dumps({**asdict(diag), **_meta(ens.digest().hex(), ens.seed)}, sort_keys=True))
    return 0


def _ensemble_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file whose keys mirror the long flags")
    p.add_argument("--model", choices=["general-l", "general-a", "block-l", "block-a"])
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--xi", help="const:<b> | bernoulli:<p> | rademacher:<s> | atoms:<v>@<p>,...")
    p.add_argument("--cov", help="isotropic | diag-paired:<amp> | sphere")
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="esdlab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo trials against a limit law")
    _ensemble_flags(p)
    p.add_argument("--law", help="law selector or 'auto'")
    p.add_argument("--trials", type=int)
    p.add_argument("--bins", type=int)
    p.add_argument("--eta", help="comma-separated decreasing eta schedule")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("theory", help="density and CDF curves of a limit law")
    p.add_argument("law", choices=["mp", "block-laplacian", "effective-medium",
                                   "shifted-semicircle", "semicircle", "fixed-point",
                                   "adjacency-general"])
    p.add_argument("--b", type=float)
    p.add_argument("--c1", type=float)
    p.add_argument("--c2", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--xi", default="const:1")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--grid", help="lo,hi,count (write --grid=-1,4,500 when lo is negative)")
    p.add_argument("--eta", help="comma-separated decreasing eta schedule")
    p.add_argument("--trace", type=float, help="also write Stieltjes values at Im z = TRACE")
    p.add_argument("--out", default="theory")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("compare", help="compare an eigenvalue file with a law")
    _ensemble_flags(p)
    p.add_argument("--eigs", required=True)
    p.add_argument("--law", required=True)
    p.add_argument("--moments", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", help="covariance diagnostics of a general ensemble")
    _ensemble_flags(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver certification failed at z={exc.z}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
