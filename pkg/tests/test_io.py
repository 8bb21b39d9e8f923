import numpy as np
import pytest

from esdlab import io
from esdlab.ensembles import EnsembleConfig, SymmetricMatrixSample, build
from esdlab.measure import XiSpec
from esdlab.spectra import esd_histogram


def _sample():
    cfg = EnsembleConfig("general-l", XiSpec.const(1), n=7, m=5, seed=99)
    return build(cfg)


def test_matrix_roundtrip(tmp_path):
    s = _sample()
    path = tmp_path / "m.esl"
    io.write_matrix(path, s)
    raw = path.read_bytes()
    assert raw[:4] == b"ESL1"
    assert int.from_bytes(raw[4:12], "little") == 7
    assert int.from_bytes(raw[12:20], "little") == 99
    assert len(raw) == 4 + 8 + 8 + 32 + 8 * 28
    back = io.read_matrix(path)
    assert np.array_equal(back.matrix, s.matrix)
    assert back.seed == 99 and back.digest == s.digest


def test_matrix_corruption(tmp_path):
    s = _sample()
    path = tmp_path / "m.esl"
    io.write_matrix(path, s)
    raw = path.read_bytes()
    (tmp_path / "bad").write_bytes(b"XXXX" + raw[4:])
    (tmp_path / "short").write_bytes(raw[:-8])
    (tmp_path / "long").write_bytes(raw + b"\0")
    for name in ("bad", "short", "long"):
        with pytest.raises(ValueError):
            io.read_matrix(tmp_path / name)


def test_from_lower_is_symmetric():
    s = SymmetricMatrixSample.from_lower(3, np.arange(1.0, 7.0))
    assert np.array_equal(s.matrix, s.matrix.T)
    assert s.matrix[2, 0] == 4.0 and s.matrix[0, 2] == 4.0


def test_eigs_roundtrip(tmp_path):
    eigs = np.sort(np.random.default_rng(0).standard_normal(50))
    io.write_eigs(tmp_path / "e.txt", eigs, {"seed": 3})
    text = (tmp_path / "e.txt").read_text().splitlines()
    assert text[0] == "# seed: 3"
    assert np.array_equal(io.read_eigs(tmp_path / "e.txt"), eigs)


def test_csv_headers(tmp_path):
    h = esd_histogram([0.1, 0.2, 0.9], [0, 0.5, 1.0])
    io.write_histogram(tmp_path / "h.csv", h, {"seed": 1})
    rows = io.read_csv(tmp_path / "h.csv")
    assert list(rows[0]) == ["bin_left", "bin_right", "count", "density"]
    assert float(rows[0]["density"]) == pytest.approx(2 / (3 * 0.5))
    io.write_curve(tmp_path / "c.csv", "density", [0.0, 1.0], [0.5, 0.25])
    assert list(io.read_csv(tmp_path / "c.csv")[0]) == ["lambda", "density"]
