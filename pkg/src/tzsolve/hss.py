"""HSS compression of a Cauchy-like matrix through fADI-based interpolative
decompositions.

Leaf rows C(J_v, J_v^c) are compressed by selecting rows of the fADI left
factor Z with column-pivoted QR; parents repeat the procedure on the rows
promoted by their children.  Columns mirror this with the right factor W.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import qr, solve_triangular

from .errors import LengthMismatchError, SizeGuardError
from .fadi import fadi_col_factor, fadi_row_factor
from .parallel import ordered_map
from .spectral import CauchyLikeOperator, trim_generators
from .tree import ClusterTree
from .zolotarev import _check_eps, block_shifts, fadi_iteration_count, hss_rank_bound

HSS_DENSE_GUARD = 4096
RANK_TOL = 1e-12
SAMPLE_COLS = 32


@dataclass(frozen=True)
class HSSRowView:
    vertex: int
    rows: range
    cols: np.ndarray


@dataclass(frozen=True)
class VertexRecord:
    vertex: int
    level: int
    k: int
    row_rank: int
    col_rank: int
    bound: int


@dataclass
class HSSMatrix:
    tree: ClusterTree
    eps: float
    rho: int
    D: dict[int, np.ndarray] = field(default_factory=dict)
    U: dict[int, np.ndarray] = field(default_factory=dict)
    V: dict[int, np.ndarray] = field(default_factory=dict)
    R: dict[int, np.ndarray] = field(default_factory=dict)
    W: dict[int, np.ndarray] = field(default_factory=dict)
    B: dict[int, np.ndarray] = field(default_factory=dict)
    Jsel: dict[int, np.ndarray] = field(default_factory=dict)
    Ksel: dict[int, np.ndarray] = field(default_factory=dict)
    records: list[VertexRecord] = field(default_factory=list)
    interpolative: bool = True
    accel_fallbacks: list[int] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.tree.n

    @property
    def max_rank(self) -> int:
        return max((max(r.row_rank, r.col_rank) for r in self.records), default=0)

    def row_rank(self, v: int) -> int:
        return (self.U[v] if self.tree.is_leaf(v) else self.R[v]).shape[1]

    def col_rank(self, v: int) -> int:
        return (self.V[v] if self.tree.is_leaf(v) else self.W[v]).shape[1]


def row_view(tree: ClusterTree, v: int) -> HSSRowView:
    return HSSRowView(v, tree.range(v), tree.complement(v))


def cpqr_select(Z: np.ndarray, p_cap: int, tol: float = RANK_TOL):
    """Row interpolative decomposition Z ~ U Z[sel] via CPQR of Z^*.

    Returns sorted local indices ``sel`` and U with U[sel] = I.  Columns of Z
    are normalized first (the span is unchanged, but fADI blocks differ in
    scale by orders of magnitude); pivots below ``tol`` relative to the first
    are then treated as rank deficiency and dropped.
    """
    r = Z.shape[0]
    if Z.size == 0 or p_cap <= 0 or not np.any(Z):
        return np.zeros(0, dtype=np.intp), np.zeros((r, 0), dtype=complex)
    scale = np.linalg.norm(Z, axis=0)
    Z = Z[:, scale > 0] / scale[scale > 0]
    _, Rm, piv = qr(Z.conj().T, mode="economic", pivoting=True)
    d = np.abs(np.diag(Rm))
    p = int(min(p_cap, np.count_nonzero(d > tol * d[0])))
    T = solve_triangular(Rm[:p, :p], Rm[:p, p:])
    U = np.zeros((r, p), dtype=complex)
    U[piv[:p]] = np.eye(p)
    U[piv[p:]] = T.conj().T
    order = np.argsort(piv[:p], kind="stable")
    return piv[:p][order], U[:, order]


def _vertex_k(tree: ClusterTree, v: int, eps_v: float) -> int:
    return fadi_iteration_count(tree.size(v), eps_v)


def _row_shifts(tree: ClusterTree, v: int, k: int):
    return block_shifts(tree.n, tree.start(v), tree.size(v), 1, k, narrow_side="row")


def _col_shifts(tree: ClusterTree, v: int, k: int):
    return block_shifts(tree.n, tree.start(v), tree.size(v), 1, k, narrow_side="col")


def interpolative_rows(Cop: CauchyLikeOperator, tree: ClusterTree, v: int, rows: np.ndarray, k: int, p_cap: int):
    """ID of C(rows, J_v^c) for rows inside J_v: returns (coefficients, selected global rows)."""
    if Cop.rho == 0:
        return np.zeros((rows.size, 0), dtype=complex), rows[:0]
    Z = fadi_row_factor(Cop.nodes[rows], Cop.Gt[rows], _row_shifts(tree, v, k))
    sel, U = cpqr_select(Z, p_cap)
    return U, rows[sel]


def interpolative_cols(Cop: CauchyLikeOperator, tree: ClusterTree, v: int, cols: np.ndarray, k: int, p_cap: int):
    """ID of C(J_v^c, cols) for cols inside J_v: returns (coefficients, selected global cols)."""
    if Cop.rho == 0:
        return np.zeros((cols.size, 0), dtype=complex), cols[:0]
    W = fadi_col_factor(Cop.nodes[cols], Cop.Ht[cols], _col_shifts(tree, v, k))
    sel, V = cpqr_select(W, p_cap)
    return V, cols[sel]


def leaf_row_id(Cop: CauchyLikeOperator, tree: ClusterTree, v: int, k: int, p_cap: int | None = None):
    rows = tree.indices(v)
    return interpolative_rows(Cop, tree, v, rows, k, rows.size if p_cap is None else p_cap)


def leaf_col_id(Cop: CauchyLikeOperator, tree: ClusterTree, v: int, k: int, p_cap: int | None = None):
    cols = tree.indices(v)
    return interpolative_cols(Cop, tree, v, cols, k, cols.size if p_cap is None else p_cap)


def merge_level(Cop: CauchyLikeOperator, tree: ClusterTree, v: int, child_rows, child_cols, k: int, p_cap: int):
    """Transfer matrices and promoted index sets for parent ``v``.

    ``child_rows``/``child_cols`` are the children's selected index sets in
    child order.
    """
    Jhat = np.concatenate(child_rows)
    Khat = np.concatenate(child_cols)
    R, Jv = interpolative_rows(Cop, tree, v, Jhat, k, p_cap)
    W, Kv = interpolative_cols(Cop, tree, v, Khat, k, p_cap)
    return R, Jv, W, Kv


def _sample_columns(tree: ClusterTree, v: int, count: int = SAMPLE_COLS) -> np.ndarray:
    comp = tree.complement(v)
    pick = np.unique(np.linspace(0, comp.size - 1, min(count, comp.size)).astype(np.intp))
    return comp[pick]


def _id_residual(X: np.ndarray, U: np.ndarray, local_sel: np.ndarray) -> float:
    nx = np.linalg.norm(X)
    if nx == 0:
        return 0.0
    return float(np.linalg.norm(X - U @ X[local_sel]) / nx)


def _accelerated_leaves(Ct: CauchyLikeOperator, tree: ClusterTree, k: int, p_cap: int, tol: float):
    """Leaf IDs from one base-matrix fADI per side.

    The base matrix is Toeplitz up to column signs from the wrap-around, so
    every leaf row has the same left fADI factor up to a unit scalar, and the
    leaf factor of C is that one scaled by the rescaled generators.
    """
    n, size = tree.n, tree.n_min
    f = Ct.ctx.omega ** np.arange(n)
    J0 = np.arange(size)
    Zc = fadi_row_factor(Ct.nodes[J0], f[J0], _row_shifts(tree, tree.leaves()[0], k))
    Wc = fadi_col_factor(Ct.nodes[J0], f[J0].conj(), _col_shifts(tree, tree.leaves()[0], k))
    Ghat = Ct.Gt / f[:, None]
    Hhat = Ct.Ht * f[:, None]
    out = {}
    fallbacks = []
    for v in tree.leaves():
        idx = tree.indices(v)
        Z = np.concatenate([Ghat[idx, j, None] * Zc for j in range(Ct.rho)], axis=1)
        W = np.concatenate([Hhat[idx, j, None] * Wc for j in range(Ct.rho)], axis=1)
        rs, U = cpqr_select(Z, p_cap)
        cs, V = cpqr_select(W, p_cap)
        S = _sample_columns(tree, v)
        bad = _id_residual(Ct.entries(idx, S), U, rs) > tol
        bad = bad or _id_residual(Ct.entries(S, idx).conj().T, V, cs) > tol
        if bad:
            fallbacks.append(v)
            U, Jv = leaf_row_id(Ct, tree, v, k, p_cap)
            V, Kv = leaf_col_id(Ct, tree, v, k, p_cap)
            out[v] = (U, Jv, V, Kv)
        else:
            out[v] = (U, idx[rs], V, idx[cs])
    return out, fallbacks


def hss_compress(
    Cop: CauchyLikeOperator,
    tree: ClusterTree,
    eps: float,
    accelerate_leaves: bool = False,
    threads: int | None = None,
) -> HSSMatrix:
    eps = _check_eps(eps)
    n = Cop.n
    eps_v = eps / math.log2(n)
    Ct = trim_generators(Cop)
    rho = Ct.rho
    cap = hss_rank_bound(max(rho, 1), n, eps)
    H = HSSMatrix(tree, eps, rho)

    leaves = list(tree.leaves())
    for v in leaves:
        idx = tree.indices(v)
        H.D[v] = Cop.entries(idx, idx)

    k_leaf = _vertex_k(tree, leaves[0], eps_v)
    if accelerate_leaves and rho > 0:
        ids, H.accel_fallbacks = _accelerated_leaves(Ct, tree, k_leaf, cap, max(100 * eps_v, 1e-10))
        results = [ids[v] for v in leaves]
    else:

        def leaf(v):
            U, Jv = leaf_row_id(Ct, tree, v, k_leaf, cap)
            V, Kv = leaf_col_id(Ct, tree, v, k_leaf, cap)
            return U, Jv, V, Kv

        results = ordered_map(leaf, leaves, threads)
    for v, (U, Jv, V, Kv) in zip(leaves, results):
        H.U[v], H.Jsel[v], H.V[v], H.Ksel[v] = U, Jv, V, Kv
        H.records.append(VertexRecord(v, tree.level(v), k_leaf, U.shape[1], V.shape[1], cap))

    for lev in range(tree.depth - 1, 0, -1):
        verts = list(tree.level_vertices(lev))

        def merge(v):
            a, b = tree.children(v)
            k = _vertex_k(tree, v, eps_v)
            out = merge_level(Ct, tree, v, (H.Jsel[a], H.Jsel[b]), (H.Ksel[a], H.Ksel[b]), k, cap)
            return k, out

        for v, (k, (R, Jv, W, Kv)) in zip(verts, ordered_map(merge, verts, threads)):
            H.R[v], H.Jsel[v], H.W[v], H.Ksel[v] = R, Jv, W, Kv
            H.records.append(VertexRecord(v, lev, k, R.shape[1], W.shape[1], cap))

    for v in range(1, tree.num_vertices):
        H.B[v] = Ct.entries(H.Jsel[v], H.Ksel[tree.sibling(v)])
    return H


def _check_vector(H: HSSMatrix, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape[0] != H.n:
        raise LengthMismatchError(f"vector has length {x.shape[0]}, expected {H.n}", got=x.shape[0], expected=H.n)
    return x


def hss_matvec(H: HSSMatrix, x) -> np.ndarray:
    """Up-sweep/down-sweep product in O(n p)."""
    x = _check_vector(H, x)
    t = H.tree
    xh = {}
    for v in reversed(range(1, t.num_vertices)):
        if t.is_leaf(v):
            r = t.range(v)
            xh[v] = H.V[v].conj().T @ x[r.start : r.stop]
        else:
            a, b = t.children(v)
            xh[v] = H.W[v].conj().T @ np.concatenate([xh[a], xh[b]])
    yh = {}
    y = np.empty_like(x)
    for v in range(1, t.num_vertices):
        acc = H.B[v] @ xh[t.sibling(v)]
        p = t.parent(v)
        if p != 0:
            ra = H.row_rank(t.children(p)[0])
            Rv = H.R[p][:ra] if v % 2 == 1 else H.R[p][ra:]
            acc = acc + Rv @ yh[p]
        yh[v] = acc
        if t.is_leaf(v):
            r = t.range(v)
            y[r.start : r.stop] = H.D[v] @ x[r.start : r.stop] + H.U[v] @ acc
    return y


def expanded_row_basis(H: HSSMatrix, v: int) -> np.ndarray:
    """U_v as an explicit |J_v| x p matrix via the nesting relation."""
    t = H.tree
    if t.is_leaf(v):
        return H.U[v]
    a, b = t.children(v)
    Ua, Ub = expanded_row_basis(H, a), expanded_row_basis(H, b)
    pa = Ua.shape[1]
    return np.concatenate([Ua @ H.R[v][:pa], Ub @ H.R[v][pa:]])


def expanded_col_basis(H: HSSMatrix, v: int) -> np.ndarray:
    t = H.tree
    if t.is_leaf(v):
        return H.V[v]
    a, b = t.children(v)
    Va, Vb = expanded_col_basis(H, a), expanded_col_basis(H, b)
    pa = Va.shape[1]
    return np.concatenate([Va @ H.W[v][:pa], Vb @ H.W[v][pa:]])


def hss_to_dense(H: HSSMatrix, guard: int = HSS_DENSE_GUARD) -> np.ndarray:
    n = H.n
    if n > guard:
        raise SizeGuardError(f"n={n} exceeds dense guard {guard}", n=n, guard=guard)
    t = H.tree
    A = np.zeros((n, n), dtype=complex)
    for v, Dv in H.D.items():
        r = t.range(v)
        A[r.start : r.stop, r.start : r.stop] = Dv
    Ue = {v: expanded_row_basis(H, v) for v in range(1, t.num_vertices)}
    Ve = {v: expanded_col_basis(H, v) for v in range(1, t.num_vertices)}
    for v in range(1, t.num_vertices):
        s = t.sibling(v)
        r, c = t.range(v), t.range(s)
        A[r.start : r.stop, c.start : c.stop] = Ue[v] @ H.B[v] @ Ve[s].conj().T
    return A


def orthogonalize(H: HSSMatrix) -> HSSMatrix:
    """Equivalent HSS matrix with orthonormal nested bases.

    Bottom-up QR of the bases; the triangular factors are pushed into the
    parents' transfer matrices and into the coupling blocks.
    """
    t = H.tree
    U, V, R, W, B = {}, {}, {}, {}, {}
    Su, Sv = {}, {}
    for v in reversed(range(1, t.num_vertices)):
        if t.is_leaf(v):
            U[v], Su[v] = np.linalg.qr(H.U[v])
            V[v], Sv[v] = np.linalg.qr(H.V[v])
        else:
            a, b = t.children(v)
            pa_r, pa_c = Su[a].shape[1], Sv[a].shape[1]
            stackR = np.concatenate([Su[a] @ H.R[v][:pa_r], Su[b] @ H.R[v][pa_r:]])
            stackW = np.concatenate([Sv[a] @ H.W[v][:pa_c], Sv[b] @ H.W[v][pa_c:]])
            R[v], Su[v] = np.linalg.qr(stackR)
            W[v], Sv[v] = np.linalg.qr(stackW)
    for v in range(1, t.num_vertices):
        B[v] = Su[v] @ H.B[v] @ Sv[t.sibling(v)].conj().T
    return replace(H, U=U, V=V, R=R, W=W, B=B, interpolative=False)
