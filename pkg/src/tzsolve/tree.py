"""Perfectly balanced binary cluster tree and (m, sep) block classification.

Vertices are numbered level by level: level l holds 2^l - 1 .. 2^(l+1) - 2,
vertex v has children 2v+1 and 2v+2, and J_v is a contiguous index range.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSizeError
from .toeplitz import is_power_of_two

DEFAULT_N_MIN = 64


@dataclass(frozen=True)
class BlockClass:
    m: int
    sep: int


NOT_ADMISSIBLE = None


@dataclass(frozen=True)
class ClusterTree:
    n: int
    n_min: int

    @property
    def depth(self) -> int:
        return (self.n // self.n_min).bit_length() - 1

    @property
    def num_vertices(self) -> int:
        return 2 ** (self.depth + 1) - 1

    @staticmethod
    def level(v: int) -> int:
        return (v + 1).bit_length() - 1

    def size(self, v: int) -> int:
        return self.n >> self.level(v)

    def range(self, v: int) -> range:
        lev = self.level(v)
        size = self.n >> lev
        start = (v - (2**lev - 1)) * size
        return range(start, start + size)

    def start(self, v: int) -> int:
        return self.range(v).start

    def indices(self, v: int) -> np.ndarray:
        r = self.range(v)
        return np.arange(r.start, r.stop)

    def complement(self, v: int) -> np.ndarray:
        r = self.range(v)
        return np.concatenate([np.arange(r.stop, self.n), np.arange(0, r.start)])

    def is_leaf(self, v: int) -> bool:
        return self.level(v) == self.depth

    @staticmethod
    def children(v: int) -> tuple[int, int]:
        return 2 * v + 1, 2 * v + 2

    @staticmethod
    def parent(v: int) -> int:
        return (v - 1) // 2

    @staticmethod
    def sibling(v: int) -> int:
        if v == 0:
            raise ValueError("the root has no sibling")
        return v - 1 if v % 2 == 0 else v + 1

    def level_vertices(self, lev: int) -> range:
        return range(2**lev - 1, 2 ** (lev + 1) - 1)

    def leaves(self) -> range:
        return self.level_vertices(self.depth)

    def vertices(self) -> range:
        return range(self.num_vertices)


def build_tree(n: int, n_min: int = DEFAULT_N_MIN) -> ClusterTree:
    if not (is_power_of_two(n) and is_power_of_two(n_min)):
        raise InvalidSizeError(f"n={n} and n_min={n_min} must be powers of two")
    if n_min < 2 or n_min > n // 2:
        raise InvalidSizeError(f"need 2 <= n_min <= n/2, got n_min={n_min}, n={n}")
    return ClusterTree(n, n_min)


def cyclic_distance(J, K, n: int) -> int:
    """min over j in J, k in K of the cyclic index distance."""
    J = np.asarray(J, dtype=np.intp) % n
    Ks = np.unique(np.asarray(K, dtype=np.intp) % n)
    pos = np.searchsorted(Ks, J)
    right = Ks[pos % Ks.size]
    left = Ks[(pos - 1) % Ks.size]
    d = np.minimum(np.abs(J - right), np.abs(J - left))
    d = np.minimum(d, n - d)
    return int(d.min())


def classify(J, K, n: int):
    """(m, sep) of the submatrix C[J, K], or NOT_ADMISSIBLE if J and K meet.

    m is the span of K; sep is the cyclic separation between J and K.
    """
    J = np.asarray(J, dtype=np.intp)
    K = np.asarray(K, dtype=np.intp)
    if J.size == 0 or K.size == 0:
        raise ValueError("index sets must be nonempty")
    sep = cyclic_distance(J, K, n)
    if sep == 0:
        return NOT_ADMISSIBLE
    return BlockClass(m=int(K.max() - K.min() + 1), sep=sep)
