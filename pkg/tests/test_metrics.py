import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from esdlab.ensembles import EnsembleConfig, build
from esdlab.limits import EffectiveMedium, MarchenkoPastur, ShiftedSemicircle
from esdlab.measure import XiSpec
from esdlab.metrics import ComparisonReport, compare, esd_moments, ks_distance, law_moments
from esdlab.spectra import eigenvalues_symmetric


def quantile_grid(law, n):
    return np.array([law.quantile((i - 0.5) / n) for i in range(1, n + 1)])


@pytest.mark.parametrize("law", [ShiftedSemicircle(0, 1), MarchenkoPastur(1, 1)], ids=str)
@pytest.mark.parametrize("n", [10, 57, 200])
def test_ks_quantile_grid(law, n):
    assert ks_distance(quantile_grid(law, n), law) == pytest.approx(1 / (2 * n), abs=1e-9)


def test_ks_atom_and_shift():
    law = MarchenkoPastur(0, 2.5)
    assert ks_distance(np.full(20, 2.5), law) == 0.0
    sc = ShiftedSemicircle(0, 1)
    assert ks_distance(quantile_grid(sc, 30) + 10, sc) == 1.0


def test_ks_mixed_atom_law():
    # EffectiveMedium(0.5) has an atom of weight 0.5 at 0
    law = EffectiveMedium(0.5)
    n = 40
    eigs = quantile_grid(law, n)
    assert np.sum(eigs == 0.0) == n // 2
    assert ks_distance(eigs, law) <= 1 / n + 1e-9


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=50))
def test_ks_in_unit_interval(xs):
    assert 0.0 <= ks_distance(np.array(xs), ShiftedSemicircle(0, 1)) <= 1.0


def test_esd_moments_examples():
    assert esd_moments([-1.0, 1.0], 2) == [0.0, 1.0]
    with pytest.raises(ValueError):
        esd_moments([1.0], 0)
    s = build(EnsembleConfig("block-a", XiSpec.bernoulli(0.5), r=10, d=4, seed=2))
    assert np.trace(s.matrix) == 0.0
    assert abs(esd_moments(eigenvalues_symmetric(s), 1)[0]) <= 1e-13


def test_general_l_first_moment():
    s = build(EnsembleConfig("general-l", XiSpec.const(1), n=2000, m=2000, seed=5))
    assert esd_moments(eigenvalues_symmetric(s), 1)[0] == pytest.approx(1.0, abs=0.1)


def test_law_moments_match_quadrature():
    assert law_moments(MarchenkoPastur(1, 1), 2) == pytest.approx([1, 2], abs=1e-6)
    assert law_moments(EffectiveMedium(1), 2) == pytest.approx([0, 1], abs=1e-6)


def test_report_json_fields():
    law = ShiftedSemicircle(0, 1)
    rep = compare(quantile_grid(law, 100), law, 3, trials=2, seed=4)
    rep.extra = {"config_digest": "ab"}
    data = json.loads(rep.to_json())
    assert {"ks", "moments", "n", "trials", "seed", "law", "config_digest"} <= set(data)
    assert [row["j"] for row in data["moments"]] == [1, 2, 3]
    assert set(data["moments"][0]) == {"j", "emp", "theory", "diff"}
    assert data["law"] == "ShiftedSemicircle(c1=0, c2=1)"
    assert rep.to_json() == rep.to_json()


@pytest.mark.slow
def test_median_ks_decreases_with_n():
    law = MarchenkoPastur(1, 1)

    def median_ks(n):
        vals = [ks_distance(eigenvalues_symmetric(build(
            EnsembleConfig("general-l", XiSpec.const(1), n=n, m=n, seed=100 + s))), law)
            for s in range(5)]
        return float(np.median(vals))

    assert median_ks(4000) < median_ks(500)
