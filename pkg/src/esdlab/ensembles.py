"""Random matrix generators.

Four models are built here:

* ``general_l``: ``L = sum_a xi_a y_a y_a^T``
* ``general_a``: ``A = sum_a xi_a (y_a x_a^T + x_a y_a^T)``
* ``block_l``: the block Laplacian on ``r`` nodes of dimension ``d``
* ``block_a``: the matching block adjacency matrix

Every random draw comes from a substream keyed on ``(seed, tag, index)``, so a
matrix depends only on its config and seed, never on assembly order.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .measure import XiSpec

MAX_DENSE_SIDE = 8192

# substream tags
_XI, _Y, _X, _COV, _V = 1, 2, 3, 4, 5

MODELS = ("general-l", "general-a", "block-l", "block-a")


def substream(seed: int, tag: int, index: int = 0) -> np.random.Generator:
    """Counter-based generator for one logical stream of ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(tag), int(index)))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class CovFamilySpec:
    """Covariance family of the vectors: ``isotropic``, ``diag-paired`` or ``sphere``."""

    kind: str = "isotropic"
    amp: float = 0.0

    def __post_init__(self):
        if self.kind not in ("isotropic", "diag-paired", "sphere"):
            raise ValueError(f"unknown covariance family {self.kind!r}")
        if self.kind == "diag-paired" and not 0.0 < self.amp < 1.0:
            raise ValueError(f"diag-paired amplitude must lie in (0, 1), got {self.amp}")

    @classmethod
    def parse(cls, text: str) -> "CovFamilySpec":
        kind, _, rest = text.strip().lower().partition(":")
        if kind == "diag-paired":
            return cls(kind, float(rest))
        if rest:
            raise ValueError(f"{kind!r} takes no parameter")
        return cls(kind)

    def __str__(self) -> str:
        return f"diag-paired:{self.amp!r}" if self.kind == "diag-paired" else self.kind


@dataclass(frozen=True)
class EnsembleConfig:
    model: str
    xi: XiSpec
    n: int = 0
    m: int = 0
    cov: CovFamilySpec = field(default_factory=CovFamilySpec)
    r: int = 0
    d: int = 0
    seed: int = 0

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ValueError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if self.model not in MODELS:
            return [f"unknown model {self.model!r}"]
        if self.is_block:
            if self.r < 2 or self.d < 1:
                out.append("block models need r >= 2 and d >= 1")
            if self.n not in (0, self.r * self.d):
                out.append(f"n={self.n} does not equal r*d={self.r * self.d}")
        else:
            if self.n < 1 or self.m < 1:
                out.append("general models need n >= 1 and m >= 1")
            if self.model == "general-a" and self.cov.kind != "isotropic":
                out.append("general-a supports only the isotropic covariance family")
        if self.side > MAX_DENSE_SIDE:
            out.append(f"side {self.side} exceeds dense limit {MAX_DENSE_SIDE}")
        if not 0 <= self.seed < 2**64:
            out.append("seed must be a 64-bit unsigned integer")
        return out

    @property
    def is_block(self) -> bool:
        return self.model.startswith("block")

    @property
    def side(self) -> int:
        return self.r * self.d if self.is_block else self.n

    def to_dict(self) -> dict:
        out = {"model": self.model, "xi": str(self.xi), "seed": self.seed}
        if self.is_block:
            out.update(r=self.r, d=self.d)
        else:
            out.update(n=self.n, m=self.m, cov=str(self.cov))
        return out

    def digest(self) -> bytes:
        """32-byte SHA-256 of the canonical JSON form."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).digest()


@dataclass
class SymmetricMatrixSample:
    """One realised symmetric matrix.

    ``matrix`` is assembled from a single triangle, so it is exactly symmetric.
    Block samples also carry their active edge list and per-edge data.
    """

    matrix: np.ndarray
    seed: int
    digest: bytes
    edges: np.ndarray | None = None
    edge_xi: np.ndarray | None = None
    edge_v: np.ndarray | None = None
    blocks_touched: int = 0

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def lower_triangle(self) -> np.ndarray:
        """Lower triangle, row-major, as a flat array of length n(n+1)/2."""
        return self.matrix[np.tril_indices(self.n)]

    @classmethod
    def from_lower(cls, n: int, lower: np.ndarray, seed: int = 0, digest: bytes = b"\0" * 32):
        mat = np.zeros((n, n))
        mat[np.tril_indices(n)] = lower
        return cls(_symmetrize_lower(mat), seed, digest)


@dataclass(frozen=True)
class EnsembleDiagnostics:
    sup_op: float
    sup_trace_dev: float
    avg_hs_dev: float


def _symmetrize_lower(mat: np.ndarray) -> np.ndarray:
    """Overwrite the strict upper triangle with the lower one, in place."""
    n = mat.shape[0]
    step = 512
    for s in range(0, n, step):
        e = min(s + step, n)
        rows = np.arange(e)[:, None]
        cols = np.arange(s, e)[None, :]
        upper = rows < cols
        target = mat[:e, s:e]
        target[upper] = mat[s:e, :e].T[upper]
    return mat


# ---------------------------------------------------------------- vectors

def sample_xi(xi: XiSpec, rng: np.random.Generator) -> float:
    return xi.sample(rng)


def _paired_perturbation(amp: float, pair: int, n: int, seed: int) -> np.ndarray:
    """Zero-sum perturbation in [-amp, amp]^n shared (with opposite signs) by one pair."""
    u = substream(seed, _COV, pair).uniform(-amp, amp, n)
    u -= u.mean()
    peak = np.abs(u).max()
    if peak > amp:
        u *= amp / peak
    return u


def covariance_diagonal(cov: CovFamilySpec, alpha: int, n: int, m: int, seed: int) -> np.ndarray:
    """Diagonal of ``Q_alpha`` (every family here has diagonal covariance)."""
    if cov.kind != "diag-paired":
        return np.full(n, 1.0 / n)
    pair, odd = divmod(alpha, 2)
    if m % 2 == 1 and alpha == m - 1:
        return np.full(n, 1.0 / n)
    delta = _paired_perturbation(cov.amp, pair, n, seed)
    return (1.0 - delta if odd else 1.0 + delta) / n


def sample_vector(cov: CovFamilySpec, alpha: int, n: int, rng: np.random.Generator,
                  m: int | None = None, seed: int = 0) -> np.ndarray:
    g = rng.standard_normal(n)
    if cov.kind == "sphere":
        return g / np.linalg.norm(g)
    if cov.kind == "isotropic":
        return g / math.sqrt(n)
    if m is None or not 0 <= alpha < m:
        raise ValueError("diag-paired vectors need the family size m and 0 <= alpha < m")
    return np.sqrt(covariance_diagonal(cov, alpha, n, m, seed)) * g


def _vector_columns(config: EnsembleConfig, tag: int) -> np.ndarray:
    n, m = config.n, config.m
    out = np.empty((n, m))
    for a in range(m):
        out[:, a] = sample_vector(config.cov, a, n, substream(config.seed, tag, a),
                                  m=m, seed=config.seed)
    return out


def _xi_draws(config: EnsembleConfig, count: int) -> np.ndarray:
    return config.xi.sample(substream(config.seed, _XI), size=count)


# ---------------------------------------------------------------- assembly

def assemble_general_l(xi: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """``sum_a xi_a y_a y_a^T`` for the columns ``y_a`` of ``ys``."""
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    return _symmetrize_lower((ys * np.asarray(xi, dtype=float)) @ ys.T)


def assemble_general_a(xi: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """``sum_a xi_a (y_a x_a^T + x_a y_a^T)`` for column stacks ``xs``, ``ys``."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    half = (ys * np.asarray(xi, dtype=float)) @ xs.T
    return _symmetrize_lower(half + half.T)


def assemble_block(r: int, d: int, edges: np.ndarray, xi: np.ndarray, vs: np.ndarray,
                   laplacian: bool) -> tuple[np.ndarray, int]:
    """Block Laplacian (``laplacian=True``) or adjacency on ``r`` nodes of size ``d``.

    ``edges`` is a (p, 2) array of pairs ``k < l``; ``vs`` is (p, d).  Returns the
    matrix and the number of d x d blocks written.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    xi = np.asarray(xi, dtype=float)
    vs = np.asarray(vs, dtype=float).reshape(-1, d)
    mat = np.zeros((r, d, r, d))
    if len(edges) == 0:
        return mat.reshape(r * d, r * d), 0
    k, l = edges[:, 0], edges[:, 1]
    outer = xi[:, None, None] * vs[:, :, None] * vs[:, None, :]
    sign = -1.0 if laplacian else 1.0
    # pairs are distinct, so plain assignment never overwrites
    mat[k, :, l, :] = sign * outer
    mat[l, :, k, :] = sign * outer
    touched = 2 * len(edges)
    if laplacian:
        diag = np.zeros((r, d, d))
        np.add.at(diag, k, outer)
        np.add.at(diag, l, outer)
        idx = np.arange(r)
        mat[idx, :, idx, :] = diag
        touched += 2 * len(edges)
    return _symmetrize_lower(mat.reshape(r * d, r * d)), touched


# ---------------------------------------------------------------- builders

def build_general_l(config: EnsembleConfig) -> SymmetricMatrixSample:
    if config.model != "general-l":
        raise ValueError(f"expected general-l, got {config.model}")
    ys = _vector_columns(config, _Y)
    mat = assemble_general_l(_xi_draws(config, config.m), ys)
    return SymmetricMatrixSample(mat, config.seed, config.digest())


def build_general_a(config: EnsembleConfig) -> SymmetricMatrixSample:
    if config.model != "general-a":
        raise ValueError(f"expected general-a, got {config.model}")
    ys = _vector_columns(config, _Y)
    xs = _vector_columns(config, _X)
    mat = assemble_general_a(_xi_draws(config, config.m), xs, ys)
    return SymmetricMatrixSample(mat, config.seed, config.digest())


def _block_draws(config: EnsembleConfig):
    r, d = config.r, config.d
    k, l = np.triu_indices(r, 1)
    xi = _xi_draws(config, len(k))
    active = np.flatnonzero(xi != 0.0)
    vs = np.empty((len(active), d))
    for row, pair in enumerate(active):
        g = substream(config.seed, _V, int(pair)).standard_normal(d)
        vs[row] = g / np.linalg.norm(g)
    edges = np.column_stack([k[active], l[active]])
    return edges, xi[active], vs


def _build_block(config: EnsembleConfig, laplacian: bool) -> SymmetricMatrixSample:
    if config.r * config.d > MAX_DENSE_SIDE:
        raise ValueError("block matrix too large for dense storage")
    edges, xi, vs = _block_draws(config)
    mat, touched = assemble_block(config.r, config.d, edges, xi, vs, laplacian)
    return SymmetricMatrixSample(mat, config.seed, config.digest(), edges=edges,
                                 edge_xi=xi, edge_v=vs, blocks_touched=touched)


def build_block_l(config: EnsembleConfig) -> SymmetricMatrixSample:
    if config.model != "block-l":
        raise ValueError(f"expected block-l, got {config.model}")
    return _build_block(config, laplacian=True)


def build_block_a(config: EnsembleConfig) -> SymmetricMatrixSample:
    if config.model != "block-a":
        raise ValueError(f"expected block-a, got {config.model}")
    return _build_block(config, laplacian=False)


_BUILDERS = {
    "general-l": build_general_l,
    "general-a": build_general_a,
    "block-l": build_block_l,
    "block-a": build_block_a,
}


def build(config: EnsembleConfig) -> SymmetricMatrixSample:
    return _BUILDERS[config.model](config)


def block_vector(r: int, d: int, k: int, l: int, v: np.ndarray) -> np.ndarray:
    """The sparse vector with ``+v`` in block k and ``-v`` in block l."""
    out = np.zeros(r * d)
    out[k * d:(k + 1) * d] = v
    out[l * d:(l + 1) * d] = -np.asarray(v)
    return out


def validate_ensemble(config: EnsembleConfig) -> EnsembleDiagnostics:
    """Normalised deviations of the covariances from the isotropic-in-average conditions."""
    if config.is_block:
        raise ValueError("validation applies to general models only")
    n, m = config.n, config.m
    total = np.zeros(n)
    sup_op = sup_tr = 0.0
    for a in range(m):
        q = covariance_diagonal(config.cov, a, n, m, config.seed)
        total += q
        sup_op = max(sup_op, n * q.max())
        sup_tr = max(sup_tr, abs(math.fsum(q) - 1.0))
    avg_dev = math.sqrt(n) * float(np.linalg.norm(total / m - 1.0 / n))
    return EnsembleDiagnostics(sup_op, sup_tr, avg_dev)
