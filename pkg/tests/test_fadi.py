import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tzsolve.errors import ShiftCollisionError
from tzsolve.fadi import DiagonalSylvester, fadi, fadi_col_factor, fadi_row_factor
from tzsolve.oracle import spectral_norm
from tzsolve.zolotarev import ShiftSchedule, epsilon_rank_bound, zolotarev_bound, zolotarev_shifts

from conftest import instance


def _block_system(inst, J, K):
    C = inst.C
    return DiagonalSylvester(C.nodes[J], C.nodes[K], C.Gt[J], C.Ht[K])


def test_one_by_one_exact():
    d1, d2, g, h = 1j, -1.0, 2.0 - 1j, 0.5 + 3j
    sys = DiagonalSylvester(np.array([d1]), np.array([d2]), np.array([[g]]), np.array([[h]]))
    out = fadi(sys, ShiftSchedule(np.array([d1]), np.array([5.0 + 0j])))
    assert out.to_dense()[0, 0] == pytest.approx(g * np.conj(h) / (d1 - d2), rel=1e-15)


def test_zeros_on_all_rows_is_exact(rng):
    m = 12
    dJ = np.exp(2j * np.pi * rng.uniform(0, 0.4, m))
    dK = np.exp(2j * np.pi * rng.uniform(0.5, 0.9, 7))
    G = rng.standard_normal((m, 2)) + 1j * rng.standard_normal((m, 2))
    H = rng.standard_normal((7, 2))
    sys = DiagonalSylvester(dJ, dK, G, H)
    nus = 3.0 * np.exp(2j * np.pi * rng.uniform(0, 1, m))
    out = fadi(sys, ShiftSchedule(dJ.copy(), nus))
    X = sys.solution()
    assert np.abs(out.to_dense() - X).max() <= 1e-12 * np.abs(X).max()
    assert out.rank == 2 * m


def test_block_1024_128_meets_bound():
    inst = instance(1024, 3)
    J, K = np.arange(128, 1024), np.arange(128)
    sys = _block_system(inst, J, K)
    k = epsilon_rank_bound(1, 128, 1, 1e-8)
    out = fadi(sys, zolotarev_shifts(1024, J, K, 1, k))
    X = inst.Cd[np.ix_(J, K)]
    err = spectral_norm(X - out.to_dense())
    assert err <= zolotarev_bound(128, 1, k) * spectral_norm(X)


def test_row_factor_matches_full(rng):
    m = 64
    dJ = np.exp(2j * np.pi * (np.arange(m) + 0.5) / 256)
    G = rng.standard_normal((m, 2))
    sched = zolotarev_shifts(256, np.arange(m), np.arange(m + 4, 256), 4, 5)
    Z = fadi_row_factor(dJ, G, sched)
    sys = DiagonalSylvester(dJ, np.exp(2j * np.pi * np.arange(80, 200) / 256), G, rng.standard_normal((120, 2)))
    np.testing.assert_array_equal(Z, fadi(sys, sched).Z)
    assert Z.shape[1] == 5 * 2


def test_k1_single_solve(rng):
    dJ = np.exp(1j * rng.uniform(0, 1, 9))
    G = rng.standard_normal((9, 3))
    s = ShiftSchedule(np.array([-1.0 + 0j]), np.array([2j]))
    Z = fadi_row_factor(dJ, G, s)
    np.testing.assert_allclose(Z, (2j + 1) * G / (dJ - 2j)[:, None], rtol=1e-15)


def test_collision_reports_shift():
    d = np.exp(2j * np.pi * np.arange(4) / 8)
    s = ShiftSchedule(np.array([1j, -1j]), np.array([3.0, d[2]]))
    with pytest.raises(ShiftCollisionError) as e:
        fadi_row_factor(d, np.ones(4), s)
    assert e.value.details["side"] == "nu" and e.value.details["index"] == 1
    with pytest.raises(ShiftCollisionError):
        fadi_col_factor(d, np.ones(4), ShiftSchedule(np.array([d[3]]), np.array([3.0])))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(1, 3), st.integers(0, 2**31))
def test_factor_shapes_and_error_decay(k, rho, seed):
    r = np.random.default_rng(seed)
    n, m = 256, 32
    J, K = np.arange(m, n), np.arange(m)
    nodes = np.exp(2j * np.pi * np.arange(n) / n)
    sys = DiagonalSylvester(nodes[J], nodes[K], r.standard_normal((n - m, rho)), r.standard_normal((m, rho)))
    out = fadi(sys, zolotarev_shifts(n, J, K, 1, k))
    assert out.Z.shape == (n - m, k * rho) and out.W.shape == (m, k * rho)
    X = sys.solution()
    err = np.linalg.norm(X - out.to_dense(), 2) / np.linalg.norm(X, 2)
    assert err <= zolotarev_bound(m, 1, k) * (1 + 1e-8) + 1e-13
