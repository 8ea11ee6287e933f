"""Toeplitz operators and their Sylvester displacement generators.

The displacement equation used throughout is ``Z T - T Z = G H^*`` with ``Z``
the unit circulant down-shift.  For a Toeplitz matrix the right-hand side is
supported on row 0 and column n-1 only, so two rank-one terms suffice.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CornerMismatchError, InvalidSizeError, SizeGuardError

DENSE_GUARD = 8192


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ToeplitzOperator:
    """Toeplitz matrix stored by its first column ``col`` and first row ``row``."""

    col: np.ndarray
    row: np.ndarray

    @property
    def n(self) -> int:
        return self.col.shape[0]

    def t(self, k: int) -> complex:
        """Diagonal coefficient t_k for -n < k < n."""
        return self.col[k] if k >= 0 else self.row[-k]


@dataclass(frozen=True)
class DisplacementGenerators:
    G: np.ndarray
    H: np.ndarray

    @property
    def rho(self) -> int:
        return self.G.shape[1]


def make_toeplitz(col, row) -> ToeplitzOperator:
    col = np.asarray(col, dtype=complex).ravel()
    row = np.asarray(row, dtype=complex).ravel()
    n = col.shape[0]
    if row.shape[0] != n:
        raise InvalidSizeError(f"col has length {n} but row has length {row.shape[0]}")
    if n < 4 or not is_power_of_two(n):
        raise InvalidSizeError(f"n={n} must be a power of two >= 4", n=n)
    if col[0] != row[0]:
        raise CornerMismatchError("col[0] and row[0] must coincide")
    return ToeplitzOperator(_frozen(col), _frozen(row))


def toeplitz_generators(T: ToeplitzOperator) -> DisplacementGenerators:
    """Rank-two factorization of ``Z T - T Z``.

    Row 0 holds ``t_{n-1-k} - t_{-k-1}`` (k <= n-2) and column n-1 holds
    ``t_{j-n} - t_j`` (j >= 1); the corner (0, n-1) vanishes.
    """
    n = T.n
    col, row = T.col, T.row
    top = np.zeros(n, dtype=complex)
    k = np.arange(n - 1)
    top[:-1] = col[n - 1 - k] - row[k + 1]
    right = np.zeros(n, dtype=complex)
    j = np.arange(1, n)
    right[1:] = row[n - j] - col[j]

    G = np.zeros((n, 2), dtype=complex)
    H = np.zeros((n, 2), dtype=complex)
    G[0, 0] = 1.0
    H[:, 0] = np.conj(top)
    G[:, 1] = right
    H[n - 1, 1] = 1.0
    return DisplacementGenerators(_frozen(G), _frozen(H))


def circulant_projection_column(T: ToeplitzOperator) -> np.ndarray:
    """First column of the orthogonal projection of T onto circulant matrices.

    Entry k is the average of the k-th cyclic diagonal,
    ``((n - k) t_k + k t_{k-n}) / n``.
    """
    n = T.n
    k = np.arange(n)
    wrapped = np.zeros(n, dtype=complex)
    wrapped[1:] = T.row[n - k[1:]]
    return ((n - k) * T.col + k * wrapped) / n


def dense_toeplitz(T: ToeplitzOperator, guard: int = DENSE_GUARD) -> np.ndarray:
    n = T.n
    if n > guard:
        raise SizeGuardError(f"n={n} exceeds dense guard {guard}", n=n, guard=guard)
    j = np.arange(n)
    diff = j[:, None] - j[None, :]
    return np.where(diff >= 0, T.col[np.abs(diff)], T.row[np.abs(diff)])


def shift_matrix(n: int) -> np.ndarray:
    """Dense unit circulant down-shift Z (oracle support)."""
    return np.roll(np.eye(n, dtype=complex), 1, axis=0)


def random_toeplitz(n: int, rng: np.random.Generator, complex_entries: bool = False) -> ToeplitzOperator:
    """Toeplitz matrix with diagonal values drawn uniformly from [0, 1]."""
    col = rng.uniform(0.0, 1.0, n)
    row = rng.uniform(0.0, 1.0, n)
    if complex_entries:
        col = col + 1j * rng.uniform(0.0, 1.0, n)
        row = row + 1j * rng.uniform(0.0, 1.0, n)
    row[0] = col[0]
    return make_toeplitz(col, row)
