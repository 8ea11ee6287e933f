import numpy as np
import pytest

pytest.importorskip("flint")

from tzsolve.fadi import DiagonalSylvester, fadi
from tzsolve.oracle_hp import _to_complex, cauchy_block, fadi_errors, leading_singular_values
from tzsolve.zolotarev import zolotarev_shifts


def test_block_matches_double(inst512):
    C = inst512.C
    J, K = np.arange(0, 20), np.arange(300, 310)
    A = _to_complex(cauchy_block(C.nodes, C.Gt, C.Ht, J, K, prec=128))
    np.testing.assert_allclose(A, inst512.Cd[np.ix_(J, K)], rtol=1e-12)


def test_singular_value_bounds(rng):
    from flint import acb_mat

    A = (rng.standard_normal((30, 4)) @ rng.standard_normal((4, 25))) + 1e-9 * rng.standard_normal((30, 25))
    s = np.linalg.svd(A, compute_uv=False)
    M = acb_mat([[complex(v) for v in row] for row in A])
    est, up = leading_singular_values(M, 6, prec=200)
    np.testing.assert_allclose(est[:4], s[:4], rtol=1e-10)
    assert np.all(up >= s[:6] * (1 - 1e-12))


def test_fadi_errors_match_double_when_resolvable(inst512):
    C = inst512.C
    J, K = np.arange(64, 512), np.arange(64)
    scheds = [zolotarev_shifts(512, J, K, 1, k) for k in (1, 3, 5)]
    hp = fadi_errors(C.nodes, C.Gt, C.Ht, J, K, scheds, prec=128)
    X = inst512.Cd[np.ix_(J, K)]
    sys = DiagonalSylvester(C.nodes[J], C.nodes[K], C.Gt[J], C.Ht[K])
    dbl = [np.linalg.norm(X - fadi(sys, s).to_dense(), 2) / np.linalg.norm(X, 2) for s in scheds]
    np.testing.assert_allclose(hp, dbl, rtol=1e-6)
