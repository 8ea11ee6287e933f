"""HODLR compression of a Cauchy-like matrix by per-block fADI.

The fast variant runs one fADI per level on the generator-free base matrix
and recovers every block by diagonal scalings.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LengthMismatchError, SizeGuardError
from .fadi import LowRankFactors, fadi_col_factor, fadi_row_factor
from .parallel import ordered_map
from .spectral import CauchyLikeOperator, SpectralContext, trim_generators
from .toeplitz import DENSE_GUARD
from .tree import ClusterTree
from .zolotarev import _check_eps, epsilon_rank_bound, fadi_iteration_count, zolotarev_shifts


@dataclass(frozen=True)
class RankRecord:
    vertex: int
    level: int
    m: int
    sep: int
    k: int
    rank: int
    bound: int


@dataclass(frozen=True)
class BaseMatrix:
    """Hermitian Toeplitz kernel 1/(2i sin(pi(j-k)/n)) with zero diagonal."""

    n: int
    f: np.ndarray
    Ghat: np.ndarray
    Hhat: np.ndarray

    def entries(self, rows, cols) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.intp)
        cols = np.asarray(cols, dtype=np.intp)
        d = rows[:, None] - cols[None, :]
        s = 2j * np.sin(np.pi * d / self.n)
        out = np.zeros(d.shape, dtype=complex)
        off = d != 0
        out[off] = 1.0 / s[off]
        return out

    def dense(self, guard: int = DENSE_GUARD) -> np.ndarray:
        if self.n > guard:
            raise SizeGuardError(f"n={self.n} exceeds dense guard {guard}", n=self.n, guard=guard)
        idx = np.arange(self.n)
        return self.entries(idx, idx)


def base_matrix(Cop: CauchyLikeOperator) -> BaseMatrix:
    ctx = Cop.ctx
    f = ctx.omega ** np.arange(ctx.n)
    Ghat = Cop.Gt / f[:, None]
    Hhat = Cop.Ht * f[:, None]
    return BaseMatrix(ctx.n, f, Ghat, Hhat)


@dataclass
class ImplicitLevel:
    """Level factors of the base matrix for the first block (J_v, J_v+s)."""

    Zc: np.ndarray
    Wc: np.ndarray


@dataclass
class HODLRMatrix:
    tree: ClusterTree
    eps: float
    rho: int
    leaves: dict[int, np.ndarray]
    blocks: dict[int, LowRankFactors] = field(default_factory=dict)
    ranks: list[RankRecord] = field(default_factory=list)
    implicit: dict[int, ImplicitLevel] | None = None
    base: BaseMatrix | None = None

    @property
    def n(self) -> int:
        return self.tree.n

    @property
    def max_rank(self) -> int:
        return max((r.rank for r in self.ranks), default=0)

    def block_factors(self, v: int) -> LowRankFactors:
        """Factors of the block (J_v, J_sibling), evaluating implicit storage."""
        if self.implicit is None:
            return self.blocks[v]
        return _scaled_block(self, v)

    def to_dense(self, guard: int = DENSE_GUARD) -> np.ndarray:
        n = self.n
        if n > guard:
            raise SizeGuardError(f"n={n} exceeds dense guard {guard}", n=n, guard=guard)
        t = self.tree
        A = np.zeros((n, n), dtype=complex)
        for v, D in self.leaves.items():
            r = t.range(v)
            A[r.start : r.stop, r.start : r.stop] = D
        for v in range(1, t.num_vertices):
            r, c = t.range(v), t.range(t.sibling(v))
            A[r.start : r.stop, c.start : c.stop] = self.block_factors(v).to_dense()
        return A


def _eps_v(eps: float, n: int) -> float:
    return eps / math.log2(n)


def _leaf_blocks(Cop: CauchyLikeOperator, tree: ClusterTree) -> dict[int, np.ndarray]:
    out = {}
    for v in tree.leaves():
        idx = tree.indices(v)
        out[v] = Cop.entries(idx, idx)
    return out


def _block_record(tree: ClusterTree, v: int, k: int, rank: int, rho: int, eps_v: float) -> RankRecord:
    m = tree.size(tree.sibling(v))
    return RankRecord(v, tree.level(v), m, 1, k, rank, epsilon_rank_bound(max(rho, 1), m, 1, eps_v))


def hodlr_compress(Cop: CauchyLikeOperator, tree: ClusterTree, eps: float, threads: int | None = None) -> HODLRMatrix:
    """Per-block fADI with k from the block width and eps / log2(n)."""
    eps = _check_eps(eps)
    n = Cop.n
    eps_v = _eps_v(eps, n)
    Ct = trim_generators(Cop)
    rho = Ct.rho
    nodes = Ct.nodes

    def one(v):
        J = tree.indices(v)
        K = tree.indices(tree.sibling(v))
        k = fadi_iteration_count(K.size, eps_v)
        if rho == 0:
            empty = np.zeros((J.size, 0), dtype=complex)
            return v, k, LowRankFactors(empty, np.zeros((K.size, 0), dtype=complex))
        sched = zolotarev_shifts(n, J, K, 1, k)
        Z = fadi_row_factor(nodes[J], Ct.Gt[J], sched)
        W = fadi_col_factor(nodes[K], Ct.Ht[K], sched)
        return v, k, LowRankFactors(Z, W)

    H = HODLRMatrix(tree, eps, rho, _leaf_blocks(Cop, tree))
    for v, k, lr in ordered_map(one, range(1, tree.num_vertices), threads):
        H.blocks[v] = lr
        H.ranks.append(_block_record(tree, v, k, lr.rank, rho, eps_v))
    return H


def _level_factors(n: int, size: int, k: int) -> ImplicitLevel:
    """fADI on the base-matrix block rows 0..size-1, cols size..2size-1."""
    ctx = SpectralContext(n)
    f = ctx.omega ** np.arange(2 * size)
    J = np.arange(size)
    K = np.arange(size, 2 * size)
    sched = zolotarev_shifts(n, J, K, 1, k)
    Zc = fadi_row_factor(ctx.nodes[J], f[J], sched)
    Wc = fadi_col_factor(ctx.nodes[K], f[K].conj(), sched)
    return ImplicitLevel(Zc, Wc)


def _scaled_block(H: HODLRMatrix, v: int) -> LowRankFactors:
    t = H.tree
    lev = H.implicit[t.level(v)]
    J = t.indices(v)
    K = t.indices(t.sibling(v))
    # Left children sit above the diagonal and see the level block itself;
    # right children see its conjugate transpose.
    Zc, Wc = (lev.Zc, lev.Wc) if v % 2 == 1 else (lev.Wc, lev.Zc)
    if H.rho == 0:
        return LowRankFactors(np.zeros((J.size, 0), complex), np.zeros((K.size, 0), complex))
    Gh = H.base.Ghat[J]
    Hh = H.base.Hhat[K]
    Z = np.concatenate([Gh[:, j, None] * Zc for j in range(H.rho)], axis=1)
    W = np.concatenate([Hh[:, j, None] * Wc for j in range(H.rho)], axis=1)
    return LowRankFactors(Z, W)


def hodlr_compress_fast(
    Cop: CauchyLikeOperator,
    tree: ClusterTree,
    eps: float,
    implicit: bool = False,
    threads: int | None = None,
) -> HODLRMatrix:
    """One base-matrix fADI per level; blocks follow by diagonal scaling.

    With ``implicit`` the scalings are applied during matvecs instead of
    being stored.
    """
    eps = _check_eps(eps)
    n = Cop.n
    eps_v = _eps_v(eps, n)
    Ct = trim_generators(Cop)
    rho = Ct.rho
    H = HODLRMatrix(tree, eps, rho, _leaf_blocks(Cop, tree), base=base_matrix(Ct))
    levels = {}
    for lev in range(1, tree.depth + 1):
        size = n >> lev
        k = fadi_iteration_count(size, eps_v)
        levels[lev] = (k, _level_factors(n, size, k))
    H.implicit = {lev: f for lev, (_, f) in levels.items()}
    for v in range(1, tree.num_vertices):
        k = levels[tree.level(v)][0]
        H.ranks.append(_block_record(tree, v, k, k * rho, rho, eps_v))
    if not implicit:
        vs = range(1, tree.num_vertices)
        for v, lr in zip(vs, ordered_map(lambda v: _scaled_block(H, v), vs, threads)):
            H.blocks[v] = lr
        H.implicit = None
    return H


def hodlr_matvec(H: HODLRMatrix, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape[0] != H.n:
        raise LengthMismatchError(f"vector has length {x.shape[0]}, expected {H.n}", got=x.shape[0], expected=H.n)
    t = H.tree
    y = np.zeros_like(x)
    for v, D in H.leaves.items():
        r = t.range(v)
        y[r.start : r.stop] += D @ x[r.start : r.stop]
    for v in range(1, t.num_vertices):
        r, c = t.range(v), t.range(t.sibling(v))
        xc = x[c.start : c.stop]
        if H.implicit is None:
            lr = H.blocks[v]
            y[r.start : r.stop] += lr.Z @ (lr.W.conj().T @ xc)
            continue
        lev = H.implicit[t.level(v)]
        Zc, Wc = (lev.Zc, lev.Wc) if v % 2 == 1 else (lev.Wc, lev.Zc)
        Gh = H.base.Ghat[r.start : r.stop]
        Hh = H.base.Hhat[c.start : c.stop]
        for j in range(H.rho):
            w = Wc.conj().T @ (Hh[:, j].conj().reshape((-1,) + (1,) * (x.ndim - 1)) * xc)
            y[r.start : r.stop] += Gh[:, j].reshape((-1,) + (1,) * (x.ndim - 1)) * (Zc @ w)
    return y
