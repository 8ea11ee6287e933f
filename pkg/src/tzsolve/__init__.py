"""Superfast solvers for Toeplitz-like systems via hierarchical compression
of their Cauchy-like form."""
from .errors import TzsolveError
from .hodlr import hodlr_compress, hodlr_compress_fast, hodlr_matvec
from .hss import hss_compress, hss_matvec, hss_to_dense
from .pipeline import SolveOptions, SolveReport, compress_toeplitz, solve_toeplitz
from .spectral import to_cauchy_like
from .toeplitz import make_toeplitz, random_toeplitz
from .tree import build_tree, classify
from .ulv import ulv_factor, ulv_solve

__all__ = [
    "TzsolveError",
    "SolveOptions",
    "SolveReport",
    "build_tree",
    "classify",
    "compress_toeplitz",
    "hodlr_compress",
    "hodlr_compress_fast",
    "hodlr_matvec",
    "hss_compress",
    "hss_matvec",
    "hss_to_dense",
    "make_toeplitz",
    "random_toeplitz",
    "solve_toeplitz",
    "to_cauchy_like",
    "ulv_factor",
    "ulv_solve",
]
