import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tzsolve.errors import SingularMatrixError, SizeGuardError
from tzsolve.oracle import SVD_GUARD, dense_solve, epsilon_rank, jacobi_svd, singular_values, spectral_norm


def test_identity_and_rank_one(rng):
    np.testing.assert_allclose(singular_values(np.eye(7)), 1.0, atol=1e-15)
    u, v = rng.standard_normal(9), rng.standard_normal(6)
    s = singular_values(np.outer(u, v))
    assert s[0] == pytest.approx(np.linalg.norm(u) * np.linalg.norm(v), rel=1e-14)
    assert np.all(s[1:] <= 1e-14 * s[0])


def test_frobenius_identity(rng):
    A = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    s = singular_values(A)
    assert np.sum(s**2) == pytest.approx(np.linalg.norm(A, "fro") ** 2, rel=1e-12)
    np.testing.assert_allclose(s, np.linalg.svd(A, compute_uv=False), rtol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 20), st.integers(1, 20), st.integers(0, 2**31))
def test_svd_reconstructs(m, n, seed):
    r = np.random.default_rng(seed)
    A = r.standard_normal((m, n)) + 1j * r.standard_normal((m, n))
    U, s, V = jacobi_svd(A)
    assert np.all(np.diff(s) <= 1e-12 * max(s[0], 1))
    np.testing.assert_allclose((U * s) @ V.conj().T, A, atol=1e-12 * max(s[0], 1))


def test_graded_singular_values_relative_accuracy():
    r = np.random.default_rng(0)
    Q1, _ = np.linalg.qr(r.standard_normal((30, 30)))
    Q2, _ = np.linalg.qr(r.standard_normal((30, 30)))
    sig = 10.0 ** -np.arange(0, 15, 0.5)
    A = (Q1 * sig) @ Q2.T
    s = singular_values(A)
    assert np.all(np.abs(s[:20] - sig[:20]) <= 1e-14 + 1e-10 * sig[:20] / sig[:20] * s[0])


def test_epsilon_rank_examples():
    assert epsilon_rank(np.eye(5), 0.5) == 5
    assert epsilon_rank(np.zeros((4, 4)), 1e-8) == 0
    assert epsilon_rank(np.diag([1, 1e-3, 1e-9]), 1e-6) == 2
    assert epsilon_rank(sigma=[3.0, 1.0, 1e-9], eps=1e-6) == 2


def test_dense_solve(rng):
    b = rng.standard_normal(6)
    np.testing.assert_allclose(dense_solve(np.eye(6), b), b)
    P = np.eye(6)[[3, 1, 5, 0, 2, 4]]
    np.testing.assert_allclose(dense_solve(P, b), P.T @ b)
    A = rng.standard_normal((128, 128))
    x = dense_solve(A, b := rng.standard_normal(128))
    assert np.linalg.norm(A @ x - b) <= 1e-10 * np.linalg.norm(A, 2) * np.linalg.norm(x)
    with pytest.raises(SingularMatrixError):
        dense_solve(np.zeros((3, 3)), np.ones(3))


def test_spectral_norm(rng):
    assert spectral_norm(np.eye(10)) == pytest.approx(1.0, abs=1e-6)
    u, v = rng.standard_normal(20), rng.standard_normal(15)
    assert spectral_norm(np.outer(u, v)) == pytest.approx(np.linalg.norm(u) * np.linalg.norm(v), rel=1e-6)
    A = rng.standard_normal((64, 64))
    assert spectral_norm(A) == pytest.approx(singular_values(A)[0], rel=1e-6)
    f = spectral_norm(matvec=lambda x: A @ x, rmatvec=lambda y: A.T @ y, shape=A.shape)
    assert f == pytest.approx(singular_values(A)[0], rel=1e-6)


def test_guard():
    with pytest.raises(SizeGuardError):
        singular_values(np.zeros((SVD_GUARD + 1, SVD_GUARD + 1)))
