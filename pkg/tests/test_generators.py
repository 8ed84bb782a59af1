import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gltsym.functions import FourierTable, builtin, evaluate, fourier_coeffs_torus, parse_expr
from gltsym.generators import (
    MIDPOINT,
    basis_truncation,
    diag_sample,
    fd_diffusion_bands,
    fd_diffusion_matrix,
    grid,
    laplacian_table,
    lt_matrix,
    lt_matrix_kron,
    shift,
    toeplitz,
)
from gltsym.linalg import direct_sum_pad, frobenius_inner, kron


def test_kron_examples():
    b = np.array([[1, 2], [3, 4]])
    np.testing.assert_array_equal(kron(np.eye(2), b), np.block([[b, 0 * b], [0 * b, b]]))
    np.testing.assert_array_equal(kron(np.diag([0.5, 1]), [[1]]), np.diag([0.5, 1]))
    np.testing.assert_array_equal(kron([[0, 1], [0, 0]], [[2]]), [[0, 2], [0, 0]])


@given(st.integers(0, 2**32 - 1))
def test_kron_mixed_product(seed):
    rng = np.random.default_rng(seed)
    a, c = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    b, d = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
    np.testing.assert_allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-12)
    assert kron(a, b).shape == (6, 6)


def test_pad_examples():
    np.testing.assert_array_equal(direct_sum_pad(np.eye(2), 3), np.diag([1, 1, 0]))
    a = np.arange(4.0).reshape(2, 2)
    np.testing.assert_array_equal(direct_sum_pad(a, 2), a)
    with pytest.raises(ValueError):
        direct_sum_pad(np.eye(3), 2)


def test_frobenius_inner_examples():
    assert frobenius_inner(np.eye(5), np.eye(5)) == 5
    a = np.arange(9.0).reshape(3, 3)
    assert frobenius_inner(a, a) == pytest.approx(np.linalg.norm(a) ** 2)
    assert frobenius_inner(shift(3, 1), np.eye(3)) == 0


def test_toeplitz_examples():
    np.testing.assert_array_equal(toeplitz(laplacian_table(), 3).real,
                                  [[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
    s = toeplitz(FourierTable.from_dict({1: 1.0}), 3).real
    np.testing.assert_array_equal(s, [[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    sq = toeplitz(fourier_coeffs_torus(parse_expr("t^2", "torus"), 1, M=2**16), 2).real
    np.testing.assert_allclose(sq, [[math.pi**2 / 3, -2], [-2, math.pi**2 / 3]], atol=1e-6)


def test_diag_sample_examples():
    np.testing.assert_allclose(diag_sample(parse_expr("x"), 2), np.diag([0.5, 1]))
    np.testing.assert_allclose(diag_sample(parse_expr("1"), 3), np.eye(3))
    np.testing.assert_allclose(diag_sample(builtin("inverse_fourth_root"), 4).real,
                               np.diag([4**0.25, 2**0.25, (4 / 3) ** 0.25, 1]))


def test_lt_examples():
    one = FourierTable.from_dict({0: 1.0})
    np.testing.assert_allclose(lt_matrix(parse_expr("x"), one, 4, 2), np.diag([0.5, 0.5, 1, 1]))
    a = builtin("diffusion_coefficient")
    np.testing.assert_allclose(lt_matrix(a, one, 6, 6), diag_sample(a, 6))
    lt = lt_matrix(parse_expr("1"), laplacian_table(), 5, 2)
    t2 = np.array([[2, -1], [-1, 2]])
    expected = np.zeros((5, 5))
    expected[:2, :2] = t2
    expected[2:4, 2:4] = t2
    np.testing.assert_array_equal(lt.real, expected)


@given(st.integers(1, 40), st.integers(1, 40), st.integers(0, 3))
def test_lt_bit_equal_to_kron_oracle(n, m, K):
    m = min(m, n)
    rng = np.random.default_rng(n * 100 + m)
    fhat = FourierTable(rng.standard_normal(2 * K + 1) + 1j * rng.standard_normal(2 * K + 1))
    a = builtin("diffusion_coefficient")
    assert np.array_equal(lt_matrix(a, fhat, n, m), lt_matrix_kron(a, fhat, n, m))


def test_basis_examples():
    np.testing.assert_array_equal(basis_truncation(0, 0, 4), np.eye(4))
    s1 = np.array([[0, 0], [1, 0]])
    np.testing.assert_array_equal(basis_truncation(0, 1, 4).real, np.kron(np.eye(2), s1))
    np.testing.assert_allclose(basis_truncation(1, 0, 4), np.diag([-1, -1, 1, 1]), atol=1e-15)
    with pytest.raises(ValueError):
        basis_truncation(0, 2, 4)


def test_grid_examples():
    g = grid(1600)
    assert (g.m, g.p, g.pad) == (40, 40, 0)
    g = grid(10)
    assert (g.m, g.p, g.pad) == (3, 3, 1)
    assert g.index(2, 1) == 4
    assert (grid(1).m, grid(1).p, grid(1).pad) == (1, 1, 0)
    np.testing.assert_allclose(grid(4, nodes=MIDPOINT).points, [0.25, 0.75])
    assert len(grid(10).pairs) == 9


def test_fd_examples():
    np.testing.assert_allclose(fd_diffusion_matrix(parse_expr("1"), 3).real,
                               [[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
    np.testing.assert_allclose(fd_diffusion_matrix(parse_expr("x"), 2).real,
                               [[2 / 3, -1 / 2], [-1 / 2, 4 / 3]])
    a = builtin("diffusion_coefficient")
    t = fd_diffusion_bands(a, 1600)
    h = 1 / 1601
    assert t.diag[0] == pytest.approx((evaluate(a, h / 2) + evaluate(a, 1.5 * h)).real)
    assert t.n == 1600


@pytest.mark.parametrize("n", [2, 17, 200])
def test_fd_positive_definite(n):
    a = builtin("diffusion_coefficient")
    assert np.linalg.eigvalsh(fd_diffusion_matrix(a, n)).min() > 0
