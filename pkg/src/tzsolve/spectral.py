"""Unitary Fourier transform and the Cauchy-like form C = F T F^*.

``F[j, k] = w^(2jk) / sqrt(n)`` with ``w = exp(i pi / n)``, so F is the
orthonormal *inverse* DFT in numpy's sign convention.  With this choice
``F Z F^* = diag(w^0, w^2, ..., w^(2n-2))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import LengthMismatchError, SizeGuardError
from .toeplitz import (
    DENSE_GUARD,
    ToeplitzOperator,
    circulant_projection_column,
    toeplitz_generators,
)


@dataclass(frozen=True)
class SpectralContext:
    n: int

    @property
    def omega(self) -> complex:
        return np.exp(1j * np.pi / self.n)

    @cached_property
    def nodes(self) -> np.ndarray:
        nodes = np.exp(2j * np.pi * np.arange(self.n) / self.n)
        nodes.setflags(write=False)
        return nodes


def _check_length(ctx: SpectralContext, x: np.ndarray) -> None:
    if x.shape[0] != ctx.n:
        raise LengthMismatchError(f"expected leading dimension {ctx.n}, got {x.shape[0]}")


def apply_F(ctx: SpectralContext, x) -> np.ndarray:
    """y = F x along axis 0 (vectors or column blocks)."""
    x = np.asarray(x, dtype=complex)
    _check_length(ctx, x)
    return np.fft.ifft(x, axis=0, norm="ortho")


def apply_F_adjoint(ctx: SpectralContext, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    _check_length(ctx, x)
    return np.fft.fft(x, axis=0, norm="ortho")


def dense_F(n: int) -> np.ndarray:
    j = np.arange(n)
    # Reduce jk mod n before scaling so the angle is exact to rounding.
    return np.exp(2j * np.pi * (np.outer(j, j) % n) / n) / np.sqrt(n)


def diagonal_from_cyclic_column(ctx: SpectralContext, c) -> np.ndarray:
    """Diagonal of F P F^* for the circulant P with first column ``c``.

    Equals ``sqrt(n) * F c``: for P = Z it returns the nodes themselves.
    """
    c = np.asarray(c, dtype=complex)
    _check_length(ctx, c)
    return np.fft.ifft(c) * ctx.n


def cauchy_diagonal(T: ToeplitzOperator) -> np.ndarray:
    ctx = SpectralContext(T.n)
    return diagonal_from_cyclic_column(ctx, circulant_projection_column(T))


@dataclass(frozen=True)
class CauchyLikeOperator:
    """C with ``D C - C D = Gt Ht^*`` plus its separately recovered diagonal."""

    ctx: SpectralContext
    Gt: np.ndarray
    Ht: np.ndarray
    diagC: np.ndarray

    @property
    def n(self) -> int:
        return self.ctx.n

    @property
    def rho(self) -> int:
        return self.Gt.shape[1]

    @property
    def nodes(self) -> np.ndarray:
        return self.ctx.nodes

    def entries(self, rows, cols) -> np.ndarray:
        """Submatrix C[rows][:, cols] evaluated from the Cauchy formula."""
        rows = np.asarray(rows, dtype=np.intp)
        cols = np.asarray(cols, dtype=np.intp)
        num = self.Gt[rows] @ self.Ht[cols].conj().T
        den = self.nodes[rows][:, None] - self.nodes[cols][None, :]
        same = rows[:, None] == cols[None, :]
        den = np.where(same, 1.0, den)
        out = num / den
        if same.any():
            r, c = np.nonzero(same)
            out[r, c] = self.diagC[rows[r]]
        return out


def cauchy_from_generators(G, H, cyclic_column) -> CauchyLikeOperator:
    """Cauchy-like form of a Toeplitz-like matrix given ``G``, ``H`` and the
    first column of its circulant projection (needed for the diagonal)."""
    G = np.asarray(G, dtype=complex)
    H = np.asarray(H, dtype=complex)
    if G.ndim == 1:
        G = G[:, None]
    if H.ndim == 1:
        H = H[:, None]
    if G.shape != H.shape:
        raise LengthMismatchError(f"generator shapes differ: {G.shape} vs {H.shape}")
    ctx = SpectralContext(G.shape[0])
    Gt = apply_F(ctx, G)
    Ht = apply_F(ctx, H)
    diagC = diagonal_from_cyclic_column(ctx, cyclic_column)
    for a in (Gt, Ht, diagC):
        a.setflags(write=False)
    return CauchyLikeOperator(ctx, Gt, Ht, diagC)


def to_cauchy_like(T: ToeplitzOperator) -> CauchyLikeOperator:
    gens = toeplitz_generators(T)
    return cauchy_from_generators(gens.G, gens.H, circulant_projection_column(T))


def dense_cauchy(Cop: CauchyLikeOperator, guard: int = DENSE_GUARD) -> np.ndarray:
    n = Cop.n
    if n > guard:
        raise SizeGuardError(f"n={n} exceeds dense guard {guard}", n=n, guard=guard)
    idx = np.arange(n)
    return Cop.entries(idx, idx)


def trim_generators(Cop: CauchyLikeOperator, rtol: float = 1e-14) -> CauchyLikeOperator:
    """Equivalent operator whose generators have full numerical column rank.

    Gt Ht^* is recompressed through thin QR factors and a small SVD; terms
    below ``rtol`` times the largest are dropped.  Exact zero content (for
    example a circulant T) leaves zero generator columns.
    """
    Qg, Rg = np.linalg.qr(np.asarray(Cop.Gt))
    Qh, Rh = np.linalg.qr(np.asarray(Cop.Ht))
    u, s, vh = np.linalg.svd(Rg @ Rh.conj().T)
    keep = int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0
    root = np.sqrt(s[:keep])
    Gt = (Qg @ u[:, :keep]) * root
    Ht = (Qh @ vh[:keep].conj().T) * root
    for a in (Gt, Ht):
        a.setflags(write=False)
    return CauchyLikeOperator(Cop.ctx, Gt, Ht, Cop.diagC)
