"""Eigenvalues, empirical spectral distributions and the empirical Stieltjes transform."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


@dataclass(frozen=True)
class EsdHistogram:
    edges: np.ndarray
    counts: np.ndarray
    n: int
    out_of_range: int

    @property
    def density(self) -> np.ndarray:
        return self.counts / (self.n * np.diff(self.edges))


def eigenvalues_symmetric(matrix) -> np.ndarray:
    """All eigenvalues of a real symmetric matrix, ascending.

    Accepts an array or anything with a ``matrix`` attribute (a matrix sample).
    The matrix is copied only if LAPACK needs to overwrite it.
    """
    mat = np.asarray(getattr(matrix, "matrix", matrix), dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if not np.isfinite(mat).all():
        raise ValueError("matrix has non-finite entries")
    eigs = scipy.linalg.eigvalsh(mat, lower=True, check_finite=False, driver="evd")
    return np.sort(eigs)


def default_edges(eigs: np.ndarray, bins: int = 100) -> np.ndarray:
    lo, hi = float(np.min(eigs)), float(np.max(eigs))
    pad = 0.05 * (hi - lo)
    if pad == 0.0:
        pad = 0.5 * max(1.0, abs(lo))
    return np.linspace(lo - pad, hi + pad, bins + 1)


def esd_histogram(eigs, edges=None, bins: int = 100) -> EsdHistogram:
    """Bins are half-open ``[e_i, e_{i+1})`` except the last, which is closed."""
    eigs = np.asarray(eigs, dtype=float)
    edges = default_edges(eigs, bins) if edges is None else np.asarray(edges, dtype=float)
    if edges.ndim != 1 or len(edges) < 2:
        raise ValueError("need at least two bin edges")
    if np.any(np.diff(edges) <= 0):
        raise ValueError("bin edges must be strictly increasing")
    counts, _ = np.histogram(eigs, bins=edges)
    return EsdHistogram(edges, counts, len(eigs), int(len(eigs) - counts.sum()))


def empirical_stieltjes(eigs, z):
    """``(1/n) sum_i 1/(lambda_i - z)``; ``z`` may be a scalar or an array."""
    z_arr = np.asarray(z, dtype=complex)
    if np.any(z_arr.imag == 0):
        raise ValueError("the Stieltjes transform is defined only off the real axis")
    eigs = np.asarray(eigs, dtype=float)
    out = np.mean(1.0 / (eigs[:, None] - z_arr.reshape(-1)[None, :]), axis=0)
    return complex(out[0]) if z_arr.ndim == 0 else out.reshape(z_arr.shape)


def empirical_cdf(eigs, t):
    """Right-continuous ``#{lambda_i <= t} / n`` for sorted ``eigs``."""
    eigs = np.asarray(eigs, dtype=float)
    out = np.searchsorted(eigs, t, side="right") / len(eigs)
    return float(out) if np.ndim(t) == 0 else out


def empirical_cdf_left(eigs, t):
    """Left limit ``#{lambda_i < t} / n`` for sorted ``eigs``."""
    eigs = np.asarray(eigs, dtype=float)
    out = np.searchsorted(eigs, t, side="left") / len(eigs)
    return float(out) if np.ndim(t) == 0 else out
