"""End-to-end experiments: Monte Carlo trials, pooled spectra, theory curves, reports."""
from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from . import io as esl_io
from .ensembles import EnsembleConfig, build
from .limits import (EffectiveMedium, BlockLaplacian, FixedPointLaw, AdjacencyGeneralLaw,
                     LimitLaw, ShiftedSemicircle, SolverError, density_from_stieltjes,
                     parse_law)
from .measure import measure_from_xi
from .metrics import ComparisonReport, compare
from .spectra import eigenvalues_symmetric, esd_histogram

_TRIAL_TAG = 0x7E1A1


def eta_problems(eta) -> list[str]:
    if eta is not None and (len(eta) < 2 or min(eta) <= 0
                            or any(a <= b for a, b in zip(eta, eta[1:]))):
        return ["eta schedule must hold >= 2 decreasing positive values"]
    return []


@dataclass(frozen=True)
class ExperimentConfig:
    ensemble: EnsembleConfig
    law: str = "auto"
    trials: int = 1
    bins: int = 100
    seed: int = 0
    out: str = "out"
    eta: tuple[float, ...] | None = None
    moments: int = 2
    grid_points: int = 500

    def problems(self) -> list[str]:
        out = []
        if self.trials < 1:
            out.append("trials must be >= 1")
        if self.bins < 1:
            out.append("bins must be >= 1")
        if self.moments < 1:
            out.append("moments must be >= 1")
        out += eta_problems(self.eta)
        return out

    def to_dict(self) -> dict:
        ens = self.ensemble.to_dict()
        ens.pop("seed")
        return {"ensemble": ens, "law": self.law, "trials": self.trials, "bins": self.bins,
                "seed": self.seed, "eta": list(self.eta) if self.eta else None,
                "moments": self.moments}

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def trial_seed(seed: int, trial: int) -> int:
    """64-bit seed of trial ``trial`` derived from the master seed."""
    state = np.random.SeedSequence(int(seed), spawn_key=(_TRIAL_TAG, int(trial)))
    lo, hi = state.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def _block_edge_probability(config: EnsembleConfig) -> float | None:
    xi = config.xi
    if xi.kind == "bernoulli":
        return xi.param
    if xi.kind == "const" and xi.param == 1.0:
        return 1.0
    return None


def auto_law(config: EnsembleConfig) -> LimitLaw:
    """The limit law matching ``config`` in its asymptotic regime."""
    if config.model == "general-l":
        return FixedPointLaw(measure_from_xi(config.xi, config.m, config.n), 1.0)
    if config.model == "general-a":
        p = _block_edge_probability(config)
        if p is not None:
            return EffectiveMedium(2.0 * config.m * p / config.n)
        return AdjacencyGeneralLaw(measure_from_xi(config.xi, config.m, config.n))
    p = _block_edge_probability(config)
    if p is not None:
        c = config.r * p / config.d
        return BlockLaplacian(c) if config.model == "block-l" else EffectiveMedium(c)
    if config.model == "block-a" and config.xi.kind == "rademacher":
        # the law scales with the weights; s = sqrt(d/r) gives the unit semicircle
        return ShiftedSemicircle(0.0, config.r * config.xi.param ** 2 / config.d)
    raise ValueError(f"no automatic law for {config.model} with xi={config.xi}; pass --law")


def resolve_law(selector: str, config: EnsembleConfig | None = None, measure=None) -> LimitLaw:
    if selector == "auto":
        if config is None:
            raise ValueError("law 'auto' needs an ensemble configuration")
        return auto_law(config)
    if measure is None and config is not None and not config.is_block:
        measure = measure_from_xi(config.xi, config.m, config.n)
    return parse_law(selector, measure)


def thread_count() -> int:
    raw = os.environ.get("ESL_THREADS", "")
    try:
        return max(1, int(raw)) if raw else (os.cpu_count() or 1)
    except ValueError:
        raise ValueError(f"ESL_THREADS must be an integer, got {raw!r}") from None


def _run_trial(config: EnsembleConfig) -> np.ndarray:
    return eigenvalues_symmetric(build(config))


def run_trials(config: ExperimentConfig) -> list[np.ndarray]:
    """Eigenvalues of every trial, in trial order, independent of the worker count."""
    configs = [replace(config.ensemble, seed=trial_seed(config.seed, k))
               for k in range(config.trials)]
    workers = min(thread_count(), config.trials)
    if workers == 1:
        return [_run_trial(c) for c in configs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_trial, configs))


def _meta(digest: str, seed: int) -> dict:
    return {"config_digest": digest, "seed": seed, "version": __version__}


def law_density(law: LimitLaw, lam: np.ndarray, eta=None) -> np.ndarray:
    """Closed forms are evaluated directly; solver laws honour an explicit eta schedule."""
    if eta is not None and not law.closed_form:
        return np.atleast_1d(density_from_stieltjes(law, lam, eta))
    return np.atleast_1d(law.density(lam))


def default_grid(law: LimitLaw, points: int = 500) -> np.ndarray:
    lo, hi = law.support_bounds()
    pad = 0.1 * max(hi - lo, 1.0)
    return np.linspace(lo - pad, hi + pad, points)


@dataclass
class TheoryResult:
    lam: np.ndarray
    density: np.ndarray
    cdf: np.ndarray
    atoms: list
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def theory_curve(law: LimitLaw, lam=None, eta=None, out: str | Path | None = None,
                 meta: dict | None = None) -> TheoryResult:
    """Density and CDF of ``law`` on ``lam``; failing grid points become NaN and are listed."""
    lam = default_grid(law) if lam is None else np.asarray(lam, dtype=float)
    failures = []
    try:
        dens = law_density(law, lam, eta)
    except SolverError:
        dens = np.empty(len(lam))
        for i, x in enumerate(lam):
            try:
                dens[i] = law_density(law, np.array([x]), eta)[0]
            except SolverError as exc:
                dens[i] = math.nan
                failures.append({"lambda": float(x), "z": str(exc.z), "error": str(exc)})
    try:
        cdf = np.atleast_1d(law.cdf(lam))
    except SolverError as exc:
        cdf = np.full(len(lam), math.nan)
        failures.append({"lambda": None, "z": str(exc.z), "error": f"cdf: {exc}"})
    atoms = [{"lambda": a.location, "w": a.weight} for a in law.atoms()]
    result = TheoryResult(lam, dens, cdf, atoms, failures)
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        esl_io.write_curve(out / "theory_density.csv", "density", lam, dens, meta)
        esl_io.write_curve(out / "theory_cdf.csv", "cdf", lam, cdf, meta)
        sidecar = {"law": str(law), "conjectural": law.conjectural, "atoms": atoms,
                   "partial": bool(failures), "failures": failures, **(meta or {})}
        (out / "theory_atoms.json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return result


def run_experiment(config: ExperimentConfig) -> ComparisonReport:
    """Run all trials, pool the eigenvalues, compare with the law and write the artifacts."""
    problems = config.problems()
    if problems:
        raise ValueError("; ".join(problems))
    law = resolve_law(config.law, config.ensemble)
    digest = config.digest()
    meta = _meta(digest, config.seed)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)

    spectra = run_trials(config)
    for k, eigs in enumerate(spectra):
        esl_io.write_eigs(out / f"eigs_trial{k}.txt", eigs,
                          {**meta, "trial": k, "trial_seed": trial_seed(config.seed, k)})
    pooled = np.sort(np.concatenate(spectra))
    hist = esd_histogram(pooled, bins=config.bins)
    esl_io.write_histogram(out / "esd.csv", hist, meta)

    lam = np.linspace(hist.edges[0], hist.edges[-1], config.grid_points)
    theory = theory_curve(law, lam, config.eta, out, meta)
    if not theory.ok:
        raise SolverError(f"theory curve failed at {len(theory.failures)} grid points",
                          theory.failures[0]["z"])

    report = compare(pooled, law, config.moments, config.trials, config.seed,
                     n=config.ensemble.side)
    report.extra = {"config_digest": digest, "version": __version__,
                    "model": config.ensemble.model, "pooled_eigenvalues": len(pooled),
                    "conjectural": law.conjectural}
    (out / "report.json").write_text(report.to_json())
    return report
