import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special, stats

from betaspec.errors import ParameterError
from betaspec.sampling import RngStream, sample_chi, sample_chi_square, sample_normal, standard_gamma


def chi_mean(k):
    return np.sqrt(2.0) * np.exp(special.gammaln((k + 1) / 2) - special.gammaln(k / 2))


def test_normal_repeatable():
    a = sample_normal(RngStream(42), 0.0, 1.0)
    b = sample_normal(RngStream(42), 0.0, 1.0)
    assert a == b


@pytest.mark.parametrize("sd", [0.0, -1.0, np.inf, np.nan])
def test_normal_rejects_bad_sd(sd):
    with pytest.raises(ParameterError):
        sample_normal(RngStream(1), 5.0, sd)


def test_normal_rejects_nonfinite_mean():
    with pytest.raises(ParameterError):
        sample_normal(RngStream(1), np.nan, 1.0)


def test_normal_moments():
    x = sample_normal(RngStream(3), 0.0, np.sqrt(2.0), size=10**6)
    assert abs(x.mean()) <= 4 * np.sqrt(2.0 / 10**6)
    assert abs(x.var() - 2.0) <= 0.02


def test_chi_one_is_abs_normal():
    s = RngStream(5)
    a = sample_chi(s.substream(0), 1.0, size=10**5)
    b = np.abs(s.substream(1).standard_normal(10**5))
    assert stats.ks_2samp(a, b).statistic <= 0.02


def test_chi_two_mean():
    x = sample_chi(RngStream(6), 2.0, size=10**6)
    assert abs(x.mean() / np.sqrt(np.pi / 2) - 1) <= 0.01


def test_chi_concentrates_for_huge_dof():
    k = 1e6
    x = sample_chi(RngStream(7), k, size=10**4) / np.sqrt(k)
    assert np.mean(np.abs(x - 1) <= 0.01) >= 0.999


def test_chi_square_four_moments():
    x = sample_chi_square(RngStream(8), 4.0, size=10**6)
    assert abs(x.mean() / 4 - 1) <= 0.01
    assert abs(x.var() / 8 - 1) <= 0.02


def test_chi_square_two_is_exponential():
    x = sample_chi_square(RngStream(9), 2.0, size=10**5)
    assert stats.kstest(x, stats.expon(scale=2).cdf).statistic <= 0.02


def test_chi_squared_matches_chi_square():
    s = RngStream(10)
    for k in (0.5, 3.7, 40.0):
        a = sample_chi(s.substream(1), k, size=10**5) ** 2
        b = sample_chi_square(s.substream(2), k, size=10**5)
        assert stats.ks_2samp(a, b).statistic <= 0.02


def _within(x, mean, sd_of_mean, tol_sigmas=5):
    return abs(x - mean) <= tol_sigmas * sd_of_mean


@pytest.mark.parametrize("k", [0.5, 1.0, 3.7, 100.0])
def test_moments_within_five_standard_errors(k):
    N = 10**6
    s = RngStream(11, 3)
    for x, mean, var in (
        (sample_chi_square(s.substream(0), k, size=N), k, 2 * k),
        (sample_chi(s.substream(1), k, size=N), chi_mean(k), k - chi_mean(k) ** 2),
    ):
        assert _within(x.mean(), mean, np.sqrt(var / N))
        c = x - x.mean()
        se_var = np.sqrt((np.mean(c ** 4) - np.mean(c ** 2) ** 2) / N)
        assert _within(x.var(), var, se_var)


@pytest.mark.parametrize("shape", [0.05, 0.3, 1.0, 2.5, 1e4])
def test_gamma_against_scipy(shape):
    x = standard_gamma(RngStream(12), shape, size=2 * 10**4)
    assert stats.kstest(x, stats.gamma(shape).cdf).pvalue > 1e-4


def test_gamma_array_shapes_broadcast():
    x = standard_gamma(RngStream(1), np.array([0.5, 2.0, 30.0]))
    assert x.shape == (3,) and np.all(x > 0)
    y = standard_gamma(RngStream(1), 2.0, size=(4, 5))
    assert y.shape == (4, 5)
    assert isinstance(standard_gamma(RngStream(1), 2.0), float)


@pytest.mark.parametrize("k", [0.0, -1.0, np.inf, np.nan])
def test_bad_dof_rejected(k):
    with pytest.raises(ParameterError):
        sample_chi(RngStream(1), k)
    with pytest.raises(ParameterError):
        sample_chi_square(RngStream(1), k)


@pytest.mark.parametrize("seed", [-1, 2**64, 1.5])
def test_bad_seed(seed):
    with pytest.raises(ParameterError):
        RngStream(seed)


@given(st.integers(0, 2**64 - 1), st.integers(0, 1000), st.integers(0, 1000))
def test_streams_are_pure_functions_of_ids(seed, idx, child):
    a = RngStream(seed, idx).substream(child)
    b = RngStream(seed, idx).substream(child)
    assert np.array_equal(sample_chi(a, 3.3, size=8), sample_chi(b, 3.3, size=8))


def test_substream_ignores_parent_progress():
    p = RngStream(1)
    first = p.substream(4).uniform(5)
    p.uniform(1000)
    assert np.array_equal(first, p.substream(4).uniform(5))


def test_distinct_streams_uncorrelated():
    a = RngStream(1, 0).standard_normal(10**5)
    b = RngStream(1, 1).standard_normal(10**5)
    assert not np.array_equal(a[:10], b[:10])
    assert abs(np.corrcoef(a, b)[0, 1]) < 5 / np.sqrt(10**5)
