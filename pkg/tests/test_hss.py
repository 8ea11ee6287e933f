import time

import numpy as np
import pytest

from tzsolve.errors import LengthMismatchError, SizeGuardError
from tzsolve.hss import (
    cpqr_select,
    expanded_row_basis,
    hss_compress,
    hss_matvec,
    hss_to_dense,
    leaf_col_id,
    leaf_row_id,
    merge_level,
    orthogonalize,
)
from tzsolve.oracle import epsilon_rank
from tzsolve.spectral import cauchy_from_generators, dense_cauchy, to_cauchy_like
from tzsolve.toeplitz import make_toeplitz, random_toeplitz
from tzsolve.tree import build_tree
from tzsolve.zolotarev import hss_rank_bound, zolotarev_bound


def _identity(n):
    e = np.zeros(n)
    e[0] = 1
    return to_cauchy_like(make_toeplitz(e, e))


def _zero_generators(n):
    z = np.zeros((n, 1))
    return cauchy_from_generators(z, z, np.zeros(n))


def test_identity():
    H = hss_compress(_identity(256), build_tree(256, 32), 1e-8)
    assert H.max_rank == 0
    np.testing.assert_allclose(hss_to_dense(H), np.eye(256), atol=1e-14)
    x = np.arange(256.0)
    np.testing.assert_allclose(hss_matvec(H, x), x, atol=1e-12)


def test_zero_generators_empty_ids():
    Cop = _zero_generators(128)
    tree = build_tree(128, 16)
    U, J = leaf_row_id(Cop, tree, 7, 5)
    V, K = leaf_col_id(Cop, tree, 7, 5)
    assert U.shape == (16, 0) and J.size == 0 and V.shape == (16, 0) and K.size == 0
    R, Jv, W, Kv = merge_level(Cop, tree, 3, (J, J), (K, K), 5, 10)
    assert R.shape[1] == 0 and Jv.size == 0


def test_cpqr_select_identity_structure(rng):
    Z = rng.standard_normal((40, 6)) @ rng.standard_normal((6, 9))
    sel, U = cpqr_select(Z, 20)
    assert sel.size == 6
    np.testing.assert_allclose(U[sel], np.eye(6), atol=1e-13)
    np.testing.assert_allclose(U @ Z[sel], Z, atol=1e-10 * np.abs(Z).max())
    sel, U = cpqr_select(Z, 3)
    assert sel.size == 3


def test_leaf_row_id_bound(inst512):
    tree = build_tree(512, 64)
    C = inst512.C
    k = 8
    for v in tree.leaves():
        U, J = leaf_row_id(C, tree, v, k)
        rows, comp = tree.indices(v), tree.complement(v)
        X = inst512.Cd[np.ix_(rows, comp)]
        local = np.searchsorted(rows, J)
        np.testing.assert_allclose(U[local], np.eye(J.size), atol=1e-13)
        err = np.linalg.norm(X - U @ X[local], 2)
        assert err <= zolotarev_bound(64, 1, k) * (1 + np.linalg.norm(U, 2)) * np.linalg.norm(X, 2)
        V, K = leaf_col_id(C, tree, v, k)
        Y = inst512.Cd[np.ix_(comp, rows)]
        lc = np.searchsorted(rows, K)
        err = np.linalg.norm(Y - Y[:, lc] @ V.conj().T, 2)
        assert err <= zolotarev_bound(64, 1, k) * (1 + np.linalg.norm(V, 2)) * np.linalg.norm(Y, 2)


def test_column_selection_mirrors_rows_for_hermitian():
    n = 256
    r = np.random.default_rng(4)
    col = r.standard_normal(n)
    T = make_toeplitz(col, col)
    Cop = to_cauchy_like(T)
    Cd = dense_cauchy(Cop)
    assert np.abs(Cd - Cd.conj().T).max() <= 1e-12 * np.abs(Cd).max()
    tree = build_tree(n, 32)
    same = 0
    for v in tree.leaves():
        _, K = leaf_col_id(Cop, tree, v, 6)
        _, J = leaf_row_id(Cop, tree, v, 6)
        same += int(np.array_equal(J, K))
    assert same >= len(tree.leaves()) - 1


def test_nesting_consistency(inst512):
    H = hss_compress(inst512.C, build_tree(512, 64), 1e-6)
    t = H.tree
    for v in range(1, t.num_vertices):
        if t.is_leaf(v):
            continue
        a, b = t.children(v)
        Ua, Ub = expanded_row_basis(H, a), expanded_row_basis(H, b)
        blk = np.zeros((Ua.shape[0] + Ub.shape[0], Ua.shape[1] + Ub.shape[1]), dtype=complex)
        blk[: Ua.shape[0], : Ua.shape[1]] = Ua
        blk[Ua.shape[0] :, Ua.shape[1] :] = Ub
        np.testing.assert_array_equal(expanded_row_basis(H, v), blk @ H.R[v])


def test_merged_basis_bound(inst512):
    H = hss_compress(inst512.C, build_tree(512, 64), 1e-6)
    t = H.tree
    for v in t.level_vertices(1):
        U = expanded_row_basis(H, v)
        rows, comp = t.indices(v), t.complement(v)
        X = inst512.Cd[np.ix_(rows, comp)]
        local = np.searchsorted(rows, H.Jsel[v])
        err = np.linalg.norm(X - U @ X[local], 2) / np.linalg.norm(X, 2)
        assert err <= 1e-6 * (1 + np.linalg.norm(U, 2))


@pytest.mark.parametrize("eps", [1e-4, 1e-8])
def test_accuracy_and_rank_profile(inst1024, eps):
    H = hss_compress(inst1024.C, build_tree(1024, 64), eps)
    err = np.linalg.norm(inst1024.Cd - hss_to_dense(H), 2) / inst1024.normC
    assert err <= 10 * eps
    bound = hss_rank_bound(H.rho, 1024, eps)
    assert H.max_rank <= bound
    t = H.tree
    for v in t.level_vertices(2):
        rows, comp = t.indices(v), t.complement(v)
        assert epsilon_rank(inst1024.Cd[np.ix_(rows, comp)], eps) <= bound
        assert epsilon_rank(inst1024.Cd[np.ix_(comp, rows)], eps) <= bound


def test_leaf_acceleration(inst512):
    tree = build_tree(512, 64)
    a = hss_compress(inst512.C, tree, 1e-8)
    b = hss_compress(inst512.C, tree, 1e-8, accelerate_leaves=True)
    ea = np.linalg.norm(inst512.Cd - hss_to_dense(a), 2) / inst512.normC
    eb = np.linalg.norm(inst512.Cd - hss_to_dense(b), 2) / inst512.normC
    assert eb <= max(10 * ea, 1e-7)


def test_matvec_and_densify(inst512, rng):
    H = hss_compress(inst512.C, build_tree(512, 64), 1e-8)
    A = hss_to_dense(H)
    nA = np.linalg.norm(A, 2)
    for _ in range(3):
        x = rng.standard_normal(512) + 1j * rng.standard_normal(512)
        assert np.linalg.norm(hss_matvec(H, x) - A @ x) <= 1e-13 * nA * np.linalg.norm(x)
    Ho = orthogonalize(H)
    assert not Ho.interpolative
    np.testing.assert_allclose(hss_to_dense(Ho), A, atol=1e-12 * nA)
    for v in Ho.tree.leaves():
        U = Ho.U[v]
        np.testing.assert_allclose(U.conj().T @ U, np.eye(U.shape[1]), atol=1e-12)
    with pytest.raises(LengthMismatchError):
        hss_matvec(H, np.ones(3))
    with pytest.raises(SizeGuardError):
        hss_to_dense(H, guard=256)


@pytest.mark.slow
def test_matvec_cost_linear():
    def timed(n):
        H = hss_compress(to_cauchy_like(random_toeplitz(n, np.random.default_rng(0))), build_tree(n, 64), 1e-6)
        x = np.ones(n)
        best = np.inf
        for _ in range(5):
            t0 = time.perf_counter()
            hss_matvec(H, x)
            best = min(best, time.perf_counter() - t0)
        return best

    ratio = timed(16384) / timed(2048)
    assert 0.7 * 8 <= ratio <= 1.3 * 8
