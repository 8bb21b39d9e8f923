import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from esdlab.spectra import (empirical_cdf, empirical_cdf_left, empirical_stieltjes,
                            eigenvalues_symmetric, esd_histogram)

finite = st.floats(-100, 100, allow_nan=False)


def test_eig_examples():
    assert eigenvalues_symmetric(np.diag([1.0, 0, 0])) == pytest.approx([0, 0, 1])
    assert eigenvalues_symmetric(np.array([[0.0, 1], [1, 0]])) == pytest.approx([-1, 1])


def test_eig_rejects_nonfinite():
    with pytest.raises(ValueError):
        eigenvalues_symmetric(np.array([[np.nan, 0], [0, 1.0]]))


@given(arrays(float, (6, 6), elements=finite))
def test_trace_and_hs_identities(a):
    m = a + a.T
    eigs = eigenvalues_symmetric(m)
    assert np.all(np.diff(eigs) >= 0)
    tr = np.trace(m)
    assert abs(eigs.sum() - tr) <= 1e-8 * (1 + abs(tr)) + 1e-10 * np.abs(m).sum()
    hs = np.sum(m * m)
    assert abs(np.sum(eigs ** 2) - hs) <= 1e-8 * (1 + hs)


def test_histogram_examples():
    h = esd_histogram([1, 2, 3], [0, 2, 4])
    assert list(h.counts) == [1, 2] and h.out_of_range == 0
    h = esd_histogram([1, 2, 3], [0, 1, 2, 3, 10, 11])
    assert h.counts[-1] == 0
    h = esd_histogram([1, 2, 3, 20], [0, 2, 4])
    assert h.out_of_range == 1 and h.counts.sum() + h.out_of_range == h.n
    with pytest.raises(ValueError):
        esd_histogram([1.0], [0.0])
    with pytest.raises(ValueError):
        esd_histogram([1.0], [0.0, 0.0])


@given(arrays(float, st.integers(1, 40), elements=finite), st.randoms())
def test_histogram_properties(eigs, rnd):
    h = esd_histogram(eigs, bins=7)
    assert h.out_of_range == 0
    widths = np.diff(h.edges)
    assert np.sum(h.density * widths) == pytest.approx(1.0)
    perm = list(eigs)
    rnd.shuffle(perm)
    assert np.array_equal(esd_histogram(perm, h.edges).counts, h.counts)


def test_stieltjes_examples():
    assert empirical_stieltjes([0.0], 1j) == pytest.approx(1j)
    assert empirical_stieltjes([1.0], 2j) == pytest.approx((1 + 2j) / 5)
    with pytest.raises(ValueError):
        empirical_stieltjes([0.0], 1.0)


@given(arrays(float, st.integers(1, 30), elements=finite),
       st.floats(-50, 50), st.floats(1e-3, 1e3), st.booleans())
def test_stieltjes_properties(eigs, x, eta, lower):
    z = complex(x, -eta if lower else eta)
    s = empirical_stieltjes(eigs, z)
    assert s.imag * z.imag > 0
    assert abs(s) <= 1 / abs(z.imag) * (1 + 1e-12)


@given(arrays(float, st.integers(1, 30), elements=finite))
def test_stieltjes_large_eta(eigs):
    eta = 1e6
    s = empirical_stieltjes(eigs, 1j * eta)
    assert abs(1j * eta * s + 1) <= 2 * max(np.abs(eigs).max(), 1e-300) / eta + 1e-12


def test_cdf_examples():
    e = np.array([1.0, 2.0, 3.0])
    assert empirical_cdf(e, 2.0) == pytest.approx(2 / 3)
    assert empirical_cdf(e, 0.0) == 0.0
    assert empirical_cdf(e, 9.0) == 1.0
    assert empirical_cdf_left(e, 2.0) == pytest.approx(1 / 3)
