import numpy as np
import pytest

from tzsolve.errors import LengthMismatchError, SingularBlockError
from tzsolve.hss import hss_compress, hss_matvec, hss_to_dense
from tzsolve.oracle import dense_solve
from tzsolve.spectral import to_cauchy_like
from tzsolve.toeplitz import make_toeplitz
from tzsolve.tree import build_tree
from tzsolve.ulv import ulv_factor, ulv_solve


def _hss_of_column(col, n_min=32):
    col = np.asarray(col, dtype=float)
    T = make_toeplitz(col, col)
    return hss_compress(to_cauchy_like(T), build_tree(col.size, n_min), 1e-10)


def test_identity_solve():
    e = np.zeros(256)
    e[0] = 1
    F = ulv_factor(_hss_of_column(e))
    b = np.random.default_rng(0).standard_normal(256)
    np.testing.assert_allclose(ulv_solve(F, b), b, atol=1e-13)


def test_zero_matrix_is_singular():
    with pytest.raises(SingularBlockError) as e:
        ulv_factor(_hss_of_column(np.zeros(128)))
    assert "vertex" in e.value.details


def test_random_backward_error(inst512, rng):
    H = hss_compress(inst512.C, build_tree(512, 64), 1e-9)
    F = ulv_factor(H)
    A = hss_to_dense(H)
    b = rng.standard_normal(512) + 1j * rng.standard_normal(512)
    x = ulv_solve(F, b)
    nA = np.linalg.norm(A, 2)
    assert np.linalg.norm(A @ x - b) <= 1e-12 * nA * np.linalg.norm(x)
    xd = dense_solve(inst512.Cd, b)
    assert np.linalg.norm(x - xd) / np.linalg.norm(xd) <= 100 * 1e-9
    np.testing.assert_allclose(hss_matvec(H, x), b, atol=1e-11 * np.linalg.norm(b))


def test_zero_rhs_and_blocks(inst512, rng):
    F = ulv_factor(hss_compress(inst512.C, build_tree(512, 64), 1e-6))
    np.testing.assert_array_equal(ulv_solve(F, np.zeros(512)), np.zeros(512))
    B = rng.standard_normal((512, 3))
    X = ulv_solve(F, B)
    np.testing.assert_allclose(X[:, 1], ulv_solve(F, B[:, 1]))
    with pytest.raises(LengthMismatchError):
        ulv_solve(F, np.ones(100))
