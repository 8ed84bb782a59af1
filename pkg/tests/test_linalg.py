import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from gltsym.linalg import (
    ConvergenceError,
    NotHermitianError,
    SymTridiagonal,
    as_matrix,
    direct_sum_pad,
    frobenius_inner,
    hermitian_eigenvalues,
    jacobi_eigenvalues,
    kron,
    singular_values,
    sturm_bisection,
    sturm_count,
)

from conftest import random_hermitian


def charpoly_roots_by_bisection(a, tol=1e-12):
    """Eigenvalues of a small Hermitian matrix from sign changes of det(A - x I)."""
    n = a.shape[0]
    radius = np.max(np.sum(np.abs(a), axis=1)) + 1.0

    def p(x):
        return np.linalg.det(a - x * np.eye(n)).real

    # dense scan finds the brackets; repeated roots are caught by counting
    xs = np.linspace(-radius, radius, 20001)
    vals = np.array([p(x) for x in xs])
    roots = []
    for lo, hi, flo, fhi in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if flo == 0:
            roots.append(lo)
        elif flo * fhi < 0:
            while hi - lo > tol:
                mid = (lo + hi) / 2
                if p(mid) * flo <= 0:
                    hi = mid
                else:
                    lo, flo = mid, p(mid)
            roots.append((lo + hi) / 2)
    return np.sort(roots)[::-1]


def test_diag_example():
    res = hermitian_eigenvalues(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(res.values, [3, 2, 1], atol=1e-12)


def test_pauli_y():
    res = hermitian_eigenvalues(np.array([[0, -1j], [1j, 0]]))
    np.testing.assert_allclose(res.values, [1, -1], atol=1e-12)


def test_laplacian_closed_form():
    n = 50
    t = SymTridiagonal(np.full(n, 2.0), np.full(n - 1, -1.0))
    exact = 2 - 2 * np.cos(np.pi * np.arange(1, n + 1) / (n + 1))
    res = hermitian_eigenvalues(t)
    assert res.method == "bisection"
    np.testing.assert_allclose(res.values, np.sort(exact)[::-1], atol=1e-10)
    assert res.residual_bound <= 1e-9


def test_not_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        as_matrix(np.array([[np.nan, 0], [0, 1]]))


def test_jacobi_sweep_limit():
    a = random_hermitian(np.random.default_rng(0), 12)
    with pytest.raises(ConvergenceError):
        jacobi_eigenvalues(a, max_sweeps=1)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_eigenvalues_match_charpoly_oracle(rng, n):
    a = random_hermitian(rng, n)
    oracle = charpoly_roots_by_bisection(a)
    assert len(oracle) == n
    np.testing.assert_allclose(hermitian_eigenvalues(a, method="jacobi").values, oracle, atol=1e-8)
    np.testing.assert_allclose(hermitian_eigenvalues(a, method="lapack").values, oracle, atol=1e-8)


@pytest.mark.parametrize("n", [2, 4, 8])
def test_bisection_matches_charpoly_oracle(rng, n):
    t = SymTridiagonal(rng.standard_normal(n), rng.standard_normal(n - 1))
    oracle = charpoly_roots_by_bisection(t.toarray().real)
    np.testing.assert_allclose(sturm_bisection(t).values, oracle, atol=1e-8)


def test_sturm_count_monotone(rng):
    t = SymTridiagonal(rng.standard_normal(30), rng.standard_normal(29))
    xs = np.linspace(-10, 10, 200)
    counts = sturm_count(t, xs)
    assert np.all(np.diff(counts) >= 0)
    assert counts[0] == 0 and counts[-1] == 30


@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_jacobi_properties(n, seed):
    rng = np.random.default_rng(seed)
    a = random_hermitian(rng, n)
    vals = jacobi_eigenvalues(a).values
    assert np.all(np.diff(vals) <= 0)
    assert abs(vals.sum() - np.trace(a).real) <= 1e-9 * max(1, np.linalg.norm(a))
    assert abs(np.sum(vals**2) - np.linalg.norm(a) ** 2) <= 1e-9 * max(1, np.linalg.norm(a) ** 2)
    np.testing.assert_allclose(vals, np.sort(np.linalg.eigvalsh(a))[::-1], atol=1e-9)


@given(st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_bisection_against_lapack(n, seed):
    rng = np.random.default_rng(seed)
    t = SymTridiagonal(rng.standard_normal(n), rng.standard_normal(n - 1))
    np.testing.assert_allclose(sturm_bisection(t).values,
                               np.sort(np.linalg.eigvalsh(t.toarray()))[::-1], atol=1e-9)


def test_singular_values(rng):
    a = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    res = singular_values(a)
    np.testing.assert_allclose(res.values, np.linalg.svd(a, compute_uv=False), atol=1e-9)
    assert np.all(res.values >= 0)


def test_kron_and_pad():
    a = np.array([[1, 2], [3, 4]])
    b = np.eye(2)
    np.testing.assert_array_equal(kron(a, b), np.kron(a, b))
    padded = direct_sum_pad(np.ones((3, 3)), 5)
    assert padded.shape == (5, 5)
    assert padded[3:, :].sum() == 0 and padded[:, 3:].sum() == 0


@given(arrays(np.float64, (4, 4), elements=st.floats(-5, 5)),
       arrays(np.float64, (4, 4), elements=st.floats(-5, 5)))
def test_frobenius_inner_hermitian_symmetric(a, b):
    assert frobenius_inner(a, b) == pytest.approx(np.conj(frobenius_inner(b, a)), abs=1e-10)


def test_tridiagonal_arithmetic(rng):
    t = SymTridiagonal(rng.standard_normal(6), rng.standard_normal(5))
    d = rng.standard_normal((6, 6))
    np.testing.assert_allclose(d - t, d - t.toarray())
    np.testing.assert_allclose((t + t).toarray(), 2 * t.toarray())
    assert frobenius_inner(t, t).real == pytest.approx(t.frobenius_sq())
    assert math.isclose(t.frobenius_sq(), np.linalg.norm(t.toarray()) ** 2)
