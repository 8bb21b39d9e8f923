"""File formats: binary matrix container, eigenvalue lists and CSV tables.

Binary container (all little-endian)::

    b"ESL1" | n: u64 | seed: u64 | config digest: 32 bytes | lower triangle, row-major, f64
"""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .ensembles import SymmetricMatrixSample
from .spectra import EsdHistogram

MAGIC = b"ESL1"
_HEADER = struct.Struct("<4sQQ32s")


def write_matrix(path, sample: SymmetricMatrixSample) -> None:
    digest = bytes(sample.digest)
    if len(digest) != 32:
        raise ValueError("config digest must be 32 bytes")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, sample.n, sample.seed, digest))
        fh.write(sample.lower_triangle().astype("<f8").tobytes())


def read_matrix(path) -> SymmetricMatrixSample:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, n, seed, digest = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        count = n * (n + 1) // 2
        lower = np.frombuffer(fh.read(8 * count), dtype="<f8")
        if len(lower) != count:
            raise ValueError(f"{path}: expected {count} entries, found {len(lower)}")
        if fh.read(1):
            raise ValueError(f"{path}: trailing bytes after matrix data")
    return SymmetricMatrixSample.from_lower(n, lower.astype(float), seed, digest)


def _comment_lines(meta: dict | None) -> list[str]:
    return [f"# {k}: {v}" for k, v in (meta or {}).items()]


def write_eigs(path, eigs, meta: dict | None = None) -> None:
    """One eigenvalue per line, 17 significant digits; ``meta`` goes in ``#`` lines."""
    lines = _comment_lines(meta) + [f"{x:.17g}" for x in np.asarray(eigs, dtype=float)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_eigs(path) -> np.ndarray:
    vals = [float(line) for line in Path(path).read_text().splitlines()
            if line.strip() and not line.lstrip().startswith("#")]
    return np.sort(np.asarray(vals))


def _write_csv(path, header, rows, meta=None) -> None:
    with open(path, "w", newline="") as fh:
        for line in _comment_lines(meta):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


def write_histogram(path, hist: EsdHistogram, meta: dict | None = None) -> None:
    dens = hist.density
    rows = ((float(a), float(b), int(c), float(d))
            for a, b, c, d in zip(hist.edges[:-1], hist.edges[1:], hist.counts, dens))
    _write_csv(path, ["bin_left", "bin_right", "count", "density"], rows, meta)


def write_curve(path, column: str, lam, values, meta: dict | None = None) -> None:
    """Two-column theory curve ``lambda,<column>``."""
    rows = ((float(x), float(y)) for x, y in zip(lam, values))
    _write_csv(path, ["lambda", column], rows, meta)


def write_stieltjes_trace(path, z, report, meta: dict | None = None) -> None:
    z = np.atleast_1d(z)
    f = np.atleast_1d(report.f)
    res = np.atleast_1d(report.residual)
    its = np.atleast_1d(report.iterations)
    rows = ((float(a.real), float(a.imag), float(b.real), float(b.imag), float(r), int(k))
            for a, b, r, k in zip(z, f, res, its))
    _write_csv(path, ["re_z", "im_z", "re_f", "im_f", "residual", "iterations"], rows, meta)
