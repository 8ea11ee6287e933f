"""Extended-precision reference values for quantities below double precision.

Singular values of strongly separated Cauchy-like blocks and fADI errors
after many iterations drop far below 1e-16 relative, where no
double-precision computation can resolve them.  These routines evaluate the
block exactly from its double-precision inputs and work in ball arithmetic
at ``prec`` bits.  Needs python-flint.
"""
from __future__ import annotations

import numpy as np

try:
    from flint import acb, acb_mat, arb, ctx
except ImportError:  # pragma: no cover - optional dependency
    acb = None

from .zolotarev import ShiftSchedule

DEFAULT_PREC = 320


class _Precision:
    def __init__(self, prec: int):
        self.prec = prec

    def __enter__(self):
        if acb is None:
            raise ImportError("python-flint is required for extended-precision oracles")
        self.saved = ctx.prec
        ctx.prec = self.prec

    def __exit__(self, *exc):
        ctx.prec = self.saved


def _acb(z) -> "acb":
    z = complex(z)
    return acb(z.real, z.imag)


def _to_complex(a: "acb_mat") -> np.ndarray:
    rows, cols = a.nrows(), a.ncols()
    return np.array([[complex(a[i, j]) for j in range(cols)] for i in range(rows)], dtype=complex)


def cauchy_block(nodes, Gt, Ht, J, K, prec: int = DEFAULT_PREC) -> "acb_mat":
    """C(J, K) with entries Gt[j] Ht[k]^* / (x_j - x_k) evaluated at ``prec`` bits.

    The double-precision inputs are taken as exact.
    """
    Gt = np.asarray(Gt, dtype=complex).reshape(len(nodes), -1)
    Ht = np.asarray(Ht, dtype=complex).reshape(len(nodes), -1)
    with _Precision(prec):
        x = {i: _acb(nodes[i]) for i in set(map(int, J)) | set(map(int, K))}
        g = {j: [_acb(c) for c in Gt[j]] for j in map(int, J)}
        h = {k: [_acb(np.conj(c)) for c in Ht[k]] for k in map(int, K)}
        rows = []
        for j in map(int, J):
            gj, xj = g[j], x[j]
            row = []
            for k in map(int, K):
                num = gj[0] * h[k][0]
                for r in range(1, len(gj)):
                    num += gj[r] * h[k][r]
                row.append(num / (xj - x[k]))
            rows.append(row)
        return acb_mat(rows)


def leading_singular_values(A: "acb_mat", r: int, prec: int = DEFAULT_PREC):
    """Estimates and upper bounds for sigma_1..sigma_r of A.

    A pivoted Cholesky of A^*A for r steps gives A^*A = L L^* + S with S
    positive semidefinite, so sigma_i^2 <= lambda_i(L^*L) + trace(S).
    Returns (estimates, upper_bounds), both descending.
    """
    with _Precision(prec):
        S = A.conjugate().transpose() * A
        m = S.nrows()
        r = min(r, m)
        cols = []
        for _ in range(r):
            diag = [float(S[i, i].real.mid()) for i in range(m)]
            p = int(np.argmax(diag))
            if diag[p] <= 0:
                break
            col = acb_mat(m, 1, [S[i, p] for i in range(m)]) * (1 / acb(S[p, p].real).sqrt())
            S = (S - col * col.conjugate().transpose()).mid()
            cols.append(col)
        tail = max(sum((S[i, i].real for i in range(m)), arb(0)).mid(), arb(0))
        if not cols:
            return np.zeros(0), np.zeros(0)
        L = acb_mat(m, len(cols), [cols[c][i, 0] for i in range(m) for c in range(len(cols))])
        ev = (L.conjugate().transpose() * L).eig(algorithm="approx")
        lam = sorted((max(float(e.real.mid()), 0.0) for e in ev), reverse=True)
        lam = np.array(lam)
        return np.sqrt(lam), np.sqrt(lam + float(tail))


def _fadi_product(dJ, dKc, Gt, Ht, J, K, shifts: ShiftSchedule) -> "acb_mat":
    """Z W^* from the factored recurrence at the current precision."""
    rho = Gt.shape[1]
    taus = [_acb(t) for t in shifts.taus]
    nus = [_acb(v) for v in shifts.nus]
    y = [[_acb(Gt[j, r]) / (dJ[i] - nus[0]) for r in range(rho)] for i, j in enumerate(J)]
    w = [[_acb(Ht[k, r]) / (dKc[i] - taus[0].conjugate()) for r in range(rho)] for i, k in enumerate(K)]
    zcols, wcols = [], []
    for j in range(shifts.k):
        if j > 0:
            y = [[yi[r] * (dJ[i] - taus[j - 1]) / (dJ[i] - nus[j]) for r in range(rho)] for i, yi in enumerate(y)]
            w = [
                [wi[r] * (dKc[i] - nus[j - 1].conjugate()) / (dKc[i] - taus[j].conjugate()) for r in range(rho)]
                for i, wi in enumerate(w)
            ]
        scale = nus[j] - taus[j]
        zcols.append([[scale * v for v in yi] for yi in y])
        wcols.append([[v.conjugate() for v in wi] for wi in w])
    Z = acb_mat([sum((blk[i] for blk in zcols), []) for i in range(len(J))])
    Wc = acb_mat([sum((blk[i] for blk in wcols), []) for i in range(len(K))])
    return Z * Wc.transpose()


def fadi_errors(nodes, Gt, Ht, J, K, schedules, prec: int = DEFAULT_PREC) -> np.ndarray:
    """Relative 2-norm error ||X - Z W^*|| / ||X|| of fADI for each schedule.

    Each run uses the factored recurrence at ``prec`` bits; the error matrix
    is rounded to double only for the final norm.
    """
    J = np.asarray(J)
    K = np.asarray(K)
    X = cauchy_block(nodes, Gt, Ht, J, K, prec)
    Gt = np.asarray(Gt, dtype=complex).reshape(len(nodes), -1)
    Ht = np.asarray(Ht, dtype=complex).reshape(len(nodes), -1)
    nX = np.linalg.norm(_to_complex(X), 2)
    out = []
    with _Precision(prec):
        dJ = [_acb(nodes[j]) for j in J]
        dKc = [_acb(np.conj(nodes[k])) for k in K]
        for sched in schedules:
            E = X - _fadi_product(dJ, dKc, Gt, Ht, J, K, sched)
            out.append(np.linalg.norm(_to_complex(E), 2) / nX)
    return np.array(out)
