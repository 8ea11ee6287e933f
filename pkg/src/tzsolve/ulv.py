"""ULV factorization and solve for HSS matrices with orthonormal bases.

Each vertex compresses its current row basis to p rows with a unitary
transform, eliminates the remaining rows with an LQ factorization and hands
the reduced p x p system to its parent.  The root block is solved densely.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve, solve_triangular

from .errors import LengthMismatchError, SingularBlockError
from .hss import HSSMatrix, orthogonalize

SINGULAR_RTOL = 1e-14


@dataclass
class _Node:
    Qp: np.ndarray  # unitary row transform, eliminated rows first
    t: int  # number of eliminated unknowns
    L: np.ndarray  # t x t lower triangular
    P: np.ndarray  # unitary column transform
    D21: np.ndarray  # coupling of eliminated unknowns into kept rows
    Vtop: np.ndarray  # V-side projection of eliminated unknowns (t x p)
    U: np.ndarray  # reduced row basis
    V: np.ndarray  # reduced column basis
    D: np.ndarray  # reduced diagonal block


@dataclass
class ULVFactorization:
    hss: HSSMatrix
    nodes: dict[int, _Node] = field(default_factory=dict)
    root_lu: tuple | None = None
    root_size: int = 0
    norm_estimate: float = 0.0

    @property
    def n(self) -> int:
        return self.hss.n


def _norm_estimate(H: HSSMatrix) -> float:
    """Cheap lower bound on the spectral norm of an orthonormal-basis HSS matrix."""
    vals = [np.linalg.norm(D, 2) for D in H.D.values()]
    vals += [np.linalg.norm(B, 2) for B in H.B.values() if B.size]
    return max(vals, default=0.0)


def _reduce(v: int, D: np.ndarray, U: np.ndarray, V: np.ndarray, thresh: float) -> _Node:
    s, p = U.shape
    t = max(s - p, 0)
    if t == 0:
        eye = np.eye(s, dtype=complex)
        empty = np.zeros((0, 0), dtype=complex)
        return _Node(eye, 0, empty, eye, np.zeros((s, 0), complex), np.zeros((0, V.shape[1]), complex), U, V, D)
    Q, Ru = np.linalg.qr(U, mode="complete")
    Qp = np.concatenate([Q[:, p:], Q[:, :p]], axis=1)
    Dq = Qp.conj().T @ D
    # LQ of the eliminated rows: Dq[:t] = [L 0] P^*.
    Pq, Rl = np.linalg.qr(Dq[:t].conj().T, mode="complete")
    L = Rl[:t].conj().T
    smin = np.linalg.svd(L, compute_uv=False)[-1]
    if smin <= thresh:
        raise SingularBlockError(
            f"reduced block at vertex {v} is numerically singular (sigma_min={smin:.3e})",
            vertex=v,
            sigma_min=float(smin),
        )
    DP = Dq[t:] @ Pq
    Vp = Pq.conj().T @ V
    return _Node(Qp, t, L, Pq, DP[:, :t], Vp[:t], Ru[:p], Vp[t:], DP[:, t:])


def ulv_factor(H: HSSMatrix) -> ULVFactorization:
    """Factor an HSS matrix; bases are orthogonalized first if needed."""
    if H.interpolative:
        H = orthogonalize(H)
    t = H.tree
    F = ULVFactorization(H)
    F.norm_estimate = _norm_estimate(H)
    thresh = SINGULAR_RTOL * F.norm_estimate
    for v in reversed(range(t.num_vertices)):
        if t.is_leaf(v):
            D, U, V = H.D[v], H.U.get(v), H.V.get(v)
        else:
            a, b = t.children(v)
            na, nb = F.nodes[a], F.nodes[b]
            D = np.block(
                [
                    [na.D, na.U @ H.B[a] @ nb.V.conj().T],
                    [nb.U @ H.B[b] @ na.V.conj().T, nb.D],
                ]
            )
            if v != 0:
                ra = na.U.shape[1]
                U = np.concatenate([na.U @ H.R[v][:ra], nb.U @ H.R[v][ra:]])
                ca = na.V.shape[1]
                V = np.concatenate([na.V @ H.W[v][:ca], nb.V @ H.W[v][ca:]])
        if v == 0:
            F.root_size = D.shape[0]
            if D.size:
                smin = np.linalg.svd(D, compute_uv=False)[-1]
                if smin <= thresh:
                    raise SingularBlockError(
                        f"root block is numerically singular (sigma_min={smin:.3e})", vertex=0, sigma_min=float(smin)
                    )
                F.root_lu = lu_factor(D)
            break
        F.nodes[v] = _reduce(v, D, U, V, thresh)
    return F


def ulv_solve(F: ULVFactorization, b) -> np.ndarray:
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != F.n:
        raise LengthMismatchError(f"right-hand side has length {b.shape[0]}, expected {F.n}", got=b.shape[0], expected=F.n)
    if b.ndim == 2:
        return np.column_stack([ulv_solve(F, b[:, j]) for j in range(b.shape[1])])
    H = F.hss
    t = H.tree
    y1, bnew, zhat = {}, {}, {}
    for v in reversed(range(1, t.num_vertices)):
        nd = F.nodes[v]
        if t.is_leaf(v):
            r = t.range(v)
            bv = b[r.start : r.stop]
        else:
            bv = _merged_rhs(F, v, bnew, zhat)
        bq = nd.Qp.conj().T @ bv
        y1[v] = solve_triangular(nd.L, bq[: nd.t], lower=True) if nd.t else bq[:0]
        bnew[v] = bq[nd.t :] - nd.D21 @ y1[v]
        z = nd.Vtop.conj().T @ y1[v]
        if not t.is_leaf(v):
            a, c = t.children(v)
            z = z + H.W[v].conj().T @ np.concatenate([zhat[a], zhat[c]])
        zhat[v] = z
    broot = _merged_rhs(F, 0, bnew, zhat)
    xr = lu_solve(F.root_lu, broot) if broot.size else broot
    x = np.empty_like(b)
    y2 = {}
    a, c = t.children(0)
    y2[a], y2[c] = xr[: F.nodes[a].U.shape[0]], xr[F.nodes[a].U.shape[0] :]
    for v in range(1, t.num_vertices):
        nd = F.nodes[v]
        xv = nd.P @ np.concatenate([y1[v], y2[v]])
        if t.is_leaf(v):
            r = t.range(v)
            x[r.start : r.stop] = xv
        else:
            ca, cb = t.children(v)
            na = F.nodes[ca].U.shape[0]
            y2[ca], y2[cb] = xv[:na], xv[na:]
    return x


def _merged_rhs(F: ULVFactorization, v: int, bnew: dict, zhat: dict) -> np.ndarray:
    H = F.hss
    a, c = H.tree.children(v)
    na, nc = F.nodes[a], F.nodes[c]
    return np.concatenate([bnew[a] - na.U @ (H.B[a] @ zhat[c]), bnew[c] - nc.U @ (H.B[c] @ zhat[a])])
