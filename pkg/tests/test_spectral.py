import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp
from scipy.linalg import eigvalsh_tridiagonal

from betaspec.ensembles import TridiagonalMatrix, sample_hermite, sample_laguerre
from betaspec.errors import ParameterError
from betaspec.sampling import RngStream
from betaspec.spectral import PointMeasure, eigenvalues, expected_spectral_measure, spectral_measure_at_root


def assert_atoms(mu, expected, atol=1e-12):
    exp = np.array(expected, dtype=float)
    assert len(mu) == len(exp)
    assert np.allclose(mu.locations, exp[:, 0], rtol=0, atol=atol)
    assert np.allclose(mu.masses, exp[:, 1], rtol=0, atol=atol)


def dense_root_measure(T, o):
    w, V = np.linalg.eigh(T.to_dense())
    return w, V[o] ** 2


def test_two_by_two():
    assert np.allclose(eigenvalues(TridiagonalMatrix([0, 0], [1])), [-1, 1], atol=1e-15)


def test_one_by_one():
    assert eigenvalues(TridiagonalMatrix([3.25], [])).tolist() == [3.25]


def test_uniform_path_closed_form():
    n = 100
    lam = eigenvalues(TridiagonalMatrix(np.zeros(n), np.ones(n - 1)))
    exact = np.sort(2 * np.cos(np.arange(1, n + 1) * np.pi / (n + 1)))
    assert np.max(np.abs(lam - exact)) <= 1e-10


@pytest.mark.parametrize("n", [3, 17, 64, 500, 3000])
@pytest.mark.parametrize("kind", ["hermite", "laguerre"])
def test_matches_lapack(n, kind):
    s = RngStream(n)
    T = sample_hermite(n, 1.3, s) if kind == "hermite" else sample_laguerre(n, 0.7, 2.5, s)
    ref = eigvalsh_tridiagonal(T.diag, T.offdiag)
    assert np.max(np.abs(eigenvalues(T) - ref)) <= 1e-10 * max(1.0, T.norm_inf())


def test_split_blocks_and_repeated_eigenvalues():
    # two identical decoupled 2-paths plus an isolated vertex
    T = TridiagonalMatrix([0, 0, 5, 0, 0], [1, 0, 0, 1])
    assert np.allclose(eigenvalues(T), [-1, -1, 1, 1, 5], atol=1e-14)
    mu = spectral_measure_at_root(T, 0)
    assert_atoms(mu, [(-1, 0.5), (1, 0.5), (5, 0.0)], 1e-14)
    mu = spectral_measure_at_root(T, 2)
    assert_atoms(mu, [(-1, 0.0), (1, 0.0), (5, 1.0)], 1e-14)


def test_degenerate_atoms_merge():
    T = TridiagonalMatrix([2.0, 2.0, 2.0], [0.0, 0.0])
    mu = expected_spectral_measure(T)
    assert_atoms(mu, [(2.0, 1.0)])


@pytest.mark.parametrize("scale", [1e-200, 1e-30, 1.0, 1e30, 1e200])
def test_extreme_scales(scale):
    T0 = sample_hermite(40, 1.0, RngStream(5))
    T = TridiagonalMatrix(T0.diag * scale, T0.offdiag * scale)
    ref = eigvalsh_tridiagonal(T0.diag, T0.offdiag) * scale
    assert np.max(np.abs(eigenvalues(T) - ref)) <= 1e-10 * scale * T0.norm_inf()


def test_zero_matrix():
    assert eigenvalues(TridiagonalMatrix(np.zeros(4), np.zeros(3))).tolist() == [0.0] * 4


def test_wilkinson_like_clusters():
    # W21+: eigenvalue pairs agree to ~1e-14 relative
    n = 21
    d = np.abs(np.arange(n) - 10.0)
    T = TridiagonalMatrix(d, np.ones(n - 1))
    ref = eigvalsh_tridiagonal(T.diag, T.offdiag)
    assert np.max(np.abs(eigenvalues(T) - ref)) <= 1e-10 * T.norm_inf()
    mu = spectral_measure_at_root(T, 3)
    assert mu.total_mass() == pytest.approx(1.0, abs=1e-8)


def test_two_path_root_measure():
    mu = spectral_measure_at_root(TridiagonalMatrix([0, 0], [1]), 0)
    assert_atoms(mu, [(-1, 0.5), (1, 0.5)], 1e-14)


def test_single_vertex_root_measure():
    assert spectral_measure_at_root(TridiagonalMatrix([-0.4], []), 0).atoms == [(-0.4, 1.0)]


def test_three_path_center_has_zero_middle_atom():
    mu = spectral_measure_at_root(TridiagonalMatrix([0, 0, 0], [1, 1]), 1)
    r2 = np.sqrt(2)
    assert_atoms(mu, [(-r2, 0.5), (0.0, 0.0), (r2, 0.5)], 1e-14)


@pytest.mark.parametrize("o", [-1, 3, 1.0])
def test_root_out_of_range(o):
    with pytest.raises(ParameterError):
        spectral_measure_at_root(TridiagonalMatrix([0, 0, 0], [1, 1]), o)


def test_expected_measure_small():
    assert expected_spectral_measure(TridiagonalMatrix([1.5], [])).atoms == [(1.5, 1.0)]
    mu = expected_spectral_measure(TridiagonalMatrix([0, 0], [1]))
    assert_atoms(mu, [(-1, 0.5), (1, 0.5)])


def test_root_average_equals_expected_measure():
    T = sample_hermite(50, 2.0, RngStream(8))
    avg = np.mean([spectral_measure_at_root(T, o).masses for o in range(50)], axis=0)
    mu = expected_spectral_measure(T)
    assert np.max(np.abs(avg - mu.masses)) <= 1e-8


@pytest.mark.parametrize("o", [0, 7, 29])
def test_root_masses_match_dense_eigenvectors(o):
    T = sample_laguerre(30, 2.0, 1.5, RngStream(o))
    w, m = dense_root_measure(T, o)
    mu = spectral_measure_at_root(T, o)
    assert np.allclose(mu.locations, w, atol=1e-10 * T.norm_inf())
    assert np.allclose(mu.masses, m, atol=1e-10)


def _tridiag_strategy(max_n=25):
    return st.integers(1, max_n).flatmap(lambda n: st.tuples(
        hnp.arrays(float, n, elements=st.floats(-10, 10)),
        hnp.arrays(float, n - 1, elements=st.one_of(st.just(0.0), st.floats(-10, 10))),
    ))


@given(_tridiag_strategy())
def test_eigenvalues_match_dense(de):
    T = TridiagonalMatrix(*de)
    ref = np.linalg.eigvalsh(T.to_dense())
    assert np.max(np.abs(eigenvalues(T) - ref)) <= 1e-10 * max(1.0, T.norm_inf())


@given(_tridiag_strategy(), st.data())
def test_root_mass_is_one(de, data):
    T = TridiagonalMatrix(*de)
    o = data.draw(st.integers(0, T.n - 1))
    mu = spectral_measure_at_root(T, o)
    assert abs(mu.total_mass() - 1.0) <= 1e-8
    assert np.all(np.diff(mu.locations) > 0)


@given(_tridiag_strategy(40))
def test_trace_identities(de):
    T = TridiagonalMatrix(*de)
    lam = eigenvalues(T)
    tol = 1e-8 * T.n * max(1.0, T.norm_inf() ** 2)
    assert abs(lam.sum() - T.diag.sum()) <= tol
    assert abs((lam ** 2).sum() - (T.diag ** 2).sum() - 2 * (T.offdiag ** 2).sum()) <= tol


@given(st.integers(3, 200), st.integers(0, 10**6), st.data())
def test_interlacing_under_truncation(n, seed, data):
    T = sample_hermite(n, 1.0, RngStream(seed))
    k = data.draw(st.integers(1, n - 1))
    big = eigenvalues(T)
    small = eigenvalues(TridiagonalMatrix(T.diag[:k], T.offdiag[:k - 1]))
    slack = 1e-10 * max(1.0, T.norm_inf())
    # Cauchy: big[i] <= small[i] <= big[i + n - k]
    assert np.all(big[:k] <= small + slack)
    assert np.all(small <= big[n - k:] + slack)


def test_trace_identities_large():
    T = sample_hermite(10**4, 1.0, RngStream(77))
    lam = eigenvalues(T)
    tol = 1e-8 * T.n * max(1.0, T.norm_inf() ** 2)
    assert abs(lam.sum() - T.diag.sum()) <= tol
    assert abs((lam ** 2).sum() - (T.diag ** 2).sum() - 2 * (T.offdiag ** 2).sum()) <= tol


def test_workers_do_not_change_results():
    T = sample_laguerre(3000, 1.0, 2.0, RngStream(3))
    assert np.array_equal(eigenvalues(T, workers=1), eigenvalues(T, workers=3))


def test_point_measure_basics():
    mu = PointMeasure([2.0, -1.0, 0.5], [0.25, 0.5, 0.25])
    assert mu.locations.tolist() == [-1.0, 0.5, 2.0]
    assert mu.masses.tolist() == [0.5, 0.25, 0.25]
    assert mu.cdf(0.5) == pytest.approx(0.75)
    assert mu.cdf(-5) == 0.0
    with pytest.raises(ParameterError):
        PointMeasure([0.0], [-0.1])
    with pytest.raises(ParameterError):
        PointMeasure([0.0, 1.0], [1.0])


@pytest.mark.parametrize("d, e", [
    ([5e-324, 0.0, 0.0], [0.0, 5e-324]),
    ([0.0, 0.0, 0.0, 0.0], [5e-324, 1e-320, 3e-310]),
    ([1e-310, -2e-310, 0.0], [1e-310, 1e-310]),
])
def test_subnormal_entries_terminate(d, e):
    # the scale factor 2**1075 overflows; the exponent must be applied with ldexp
    T = TridiagonalMatrix(np.array(d), np.array(e))
    big = TridiagonalMatrix(np.ldexp(T.diag, 1074), np.ldexp(T.offdiag, 1074))
    ref = np.linalg.eigvalsh(big.to_dense())
    assert np.allclose(np.ldexp(eigenvalues(T), 1074), ref, rtol=0, atol=1e-12 * np.abs(ref).max())
    for o in range(T.n):
        assert spectral_measure_at_root(T, o).total_mass() == pytest.approx(1.0, abs=1e-12)


def test_near_overflow_keeps_atoms_apart():
    T = TridiagonalMatrix(np.array([1e308, -1e308, 1e308]), np.array([1e308, 1e308]))
    with np.errstate(over="ignore"):
        mu = spectral_measure_at_root(T, 1)
        nu = expected_spectral_measure(T)
    r3 = np.sqrt(3.0)
    assert np.allclose(mu.locations / 1e308, [-r3, 1.0, r3], rtol=1e-14)
    assert np.allclose(mu.masses, [(3 + r3) / 6, 0.0, (3 - r3) / 6], atol=1e-14)
    assert len(nu) == 3


@pytest.mark.parametrize("d, b", [([1.0, 1.0], 3.27648239e-07), ([2.0, 2.0 + 1e-9], 1e-8), ([-3.0, 5.0], 1e-12)])
def test_two_by_two_close_eigenvalues(d, b):
    T = TridiagonalMatrix(np.array(d), np.array([b]))
    _, V = np.linalg.eigh(T.to_dense())
    for o in (0, 1):
        mu = spectral_measure_at_root(T, o)
        assert mu.total_mass() == pytest.approx(1.0, abs=1e-14)
        if len(mu) == 2:
            assert np.allclose(mu.masses, V[o] ** 2, atol=1e-12)
