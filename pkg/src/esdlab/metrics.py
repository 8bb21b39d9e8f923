"""Comparison of empirical spectra with limit laws."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .limits import LimitLaw
from .spectra import empirical_cdf, empirical_cdf_left


@dataclass
class ComparisonReport:
    ks: float
    moments: list[dict] = field(default_factory=list)
    n: int = 0
    trials: int = 1
    seed: int = 0
    law: str = ""
    extra: dict = field(default_factory=dict)

    def to_json(self, digits: int = 12) -> str:
        """Stable JSON; floats rounded to ``digits`` significant digits."""
        def _round(x):
            if isinstance(x, float):
                return float(f"{x:.{digits}g}")
            if isinstance(x, dict):
                return {k: _round(v) for k, v in x.items()}
            if isinstance(x, list):
                return [_round(v) for v in x]
            return x
        payload = asdict(self)
        extra = payload.pop("extra")
        payload.update(extra)
        return json.dumps(_round(payload), indent=2, sort_keys=True) + "\n"


ATOM_SNAP = 1e-8


def snap_to_atoms(eigs, law: LimitLaw, rel_tol: float = ATOM_SNAP) -> np.ndarray:
    """Move eigenvalues within round-off of a law atom onto the atom.

    A rank-deficient matrix has exact zero eigenvalues that a dense solver
    returns as +-1e-14 or so; without snapping they straddle the jump.
    """
    eigs = np.sort(np.asarray(eigs, dtype=float))
    if len(eigs) == 0:
        return eigs
    tol = rel_tol * max(1.0, float(np.max(np.abs(eigs))))
    out = eigs.copy()
    for atom in law.atoms():
        out[np.abs(out - atom.location) <= tol] = atom.location
    return np.sort(out)


def ks_distance(eigs, law: LimitLaw, snap: bool = True) -> float:
    """Sup distance between the eigenvalue staircase and the law's CDF.

    Both CDFs are compared at every eigenvalue, every law atom and the support
    edges, using the value at ``t`` and the left limit at ``t``.
    """
    eigs = snap_to_atoms(eigs, law) if snap else np.sort(np.asarray(eigs, dtype=float))
    pts = [eigs, [a.location for a in law.atoms()]]
    pts += [list(iv) for iv in law.intervals()]
    t = np.unique(np.concatenate([np.asarray(p, dtype=float).ravel() for p in pts]))
    right = np.abs(empirical_cdf(eigs, t) - law.cdf(t))
    left = np.abs(empirical_cdf_left(eigs, t) - law.cdf_left(t))
    return float(min(1.0, max(right.max(), left.max())))


def esd_moments(eigs, j_max: int) -> list[float]:
    """``(1/n) sum_i lambda_i^j`` for ``j = 1..j_max``."""
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    eigs = np.asarray(eigs, dtype=float)
    return [float(np.mean(eigs ** j)) for j in range(1, j_max + 1)]


def law_moments(law: LimitLaw, j_max: int) -> list[float]:
    return law.moments(j_max)


def compare(eigs, law: LimitLaw, j_max: int = 2, trials: int = 1, seed: int = 0,
            n: int | None = None) -> ComparisonReport:
    emp = esd_moments(eigs, j_max)
    theo = law_moments(law, j_max)
    rows = [{"j": j, "emp": e, "theory": t, "diff": abs(e - t)}
            for j, e, t in zip(range(1, j_max + 1), emp, theo)]
    return ComparisonReport(ks_distance(eigs, law), rows, n if n is not None else len(eigs),
                            trials, seed, str(law))
