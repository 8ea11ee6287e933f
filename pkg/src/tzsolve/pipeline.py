"""End-to-end superfast Toeplitz solve: transform, compress, factor, solve,
transform back."""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError, FormatUnsupportedError, LengthMismatchError, NumericallySingularError, SingularBlockError
from .hodlr import HODLRMatrix, hodlr_compress, hodlr_compress_fast
from .hss import HSSMatrix, hss_compress
from .spectral import CauchyLikeOperator, apply_F, apply_F_adjoint, to_cauchy_like
from .toeplitz import ToeplitzOperator
from .tree import DEFAULT_N_MIN, build_tree
from .ulv import ulv_factor, ulv_solve
from .zolotarev import _check_eps, epsilon_rank_bound, hss_rank_bound

DEFAULT_EPS = 1e-8
FORMATS = ("hss", "hodlr")
VERIFY_GUARD = 2048


@dataclass(frozen=True)
class SolveOptions:
    eps: float = DEFAULT_EPS
    format: str = "hss"
    n_min: int = DEFAULT_N_MIN
    accelerate_leaves: bool = False
    fast: bool = False
    verify: bool = False
    threads: int | None = None

    def __post_init__(self):
        _check_eps(self.eps)
        if self.format not in FORMATS:
            raise DomainError(f"unknown format {self.format!r}; expected one of {FORMATS}")


@dataclass
class SolveReport:
    n: int
    rho: int
    eps: float
    format: str
    times: dict[str, float] = field(default_factory=dict)
    ranks: dict = field(default_factory=dict)
    verification: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _effective_n_min(n: int, n_min: int) -> int:
    return min(n_min, n // 2)


def rank_summary(A) -> dict:
    """Per-level maximal ranks with their a-priori bounds."""
    tree = A.tree
    levels = []
    if isinstance(A, HSSMatrix):
        bound = hss_rank_bound(max(A.rho, 1), A.n, A.eps)
        for lev in range(1, tree.depth + 1):
            recs = [r for r in A.records if r.level == lev]
            levels.append(
                {
                    "level": lev,
                    "max_row_rank": max(r.row_rank for r in recs),
                    "max_col_rank": max(r.col_rank for r in recs),
                    "bound": bound,
                }
            )
        return {"max_rank": A.max_rank, "bound": bound, "levels": levels}
    eps_v = A.eps / math.log2(A.n)
    for lev in range(1, tree.depth + 1):
        recs = [r for r in A.ranks if r.level == lev]
        levels.append(
            {
                "level": lev,
                "m": recs[0].m,
                "k": recs[0].k,
                "max_rank": max(r.rank for r in recs),
                "bound": epsilon_rank_bound(max(A.rho, 1), recs[0].m, 1, eps_v),
            }
        )
    return {"max_rank": A.max_rank, "bound": max(lv["bound"] for lv in levels), "levels": levels}


def compress_cauchy(Cop: CauchyLikeOperator, options: SolveOptions):
    tree = build_tree(Cop.n, _effective_n_min(Cop.n, options.n_min))
    if options.format == "hss":
        return hss_compress(Cop, tree, options.eps, options.accelerate_leaves, threads=options.threads)
    if options.fast:
        return hodlr_compress_fast(Cop, tree, options.eps, threads=options.threads)
    return hodlr_compress(Cop, tree, options.eps, threads=options.threads)


def compress_toeplitz(T: ToeplitzOperator, options: SolveOptions | None = None):
    """Compressed Cauchy-like form of T and a stats dictionary."""
    options = options or SolveOptions()
    t0 = time.perf_counter()
    Cop = to_cauchy_like(T)
    t1 = time.perf_counter()
    A = compress_cauchy(Cop, options)
    t2 = time.perf_counter()
    stats = {
        "n": T.n,
        "rho": Cop.rho,
        "eps": options.eps,
        "format": options.format,
        "fast": bool(options.fast) if options.format == "hodlr" else False,
        "leaf_accel": bool(options.accelerate_leaves) if options.format == "hss" else False,
        "n_min": A.tree.n_min,
        "times": {"transform": t1 - t0, "compress": t2 - t1},
        "ranks": rank_summary(A),
    }
    if isinstance(A, HSSMatrix):
        stats["vertices"] = [asdict(r) for r in sorted(A.records, key=lambda r: r.vertex)]
    else:
        stats["blocks"] = [asdict(r) for r in A.ranks]
    if options.verify and T.n <= VERIFY_GUARD:
        stats["verification"] = {"relative_error": compression_error(Cop, A)}
    return Cop, A, stats


def compression_error(Cop: CauchyLikeOperator, A) -> float:
    """||C - A||_2 / ||C||_2 by dense comparison."""
    from .hss import hss_to_dense
    from .spectral import dense_cauchy

    Cd = dense_cauchy(Cop)
    Ad = A.to_dense() if isinstance(A, HODLRMatrix) else hss_to_dense(A)
    return float(np.linalg.norm(Cd - Ad, 2) / np.linalg.norm(Cd, 2))


def solve_toeplitz(T: ToeplitzOperator, b, eps: float | None = None, options: SolveOptions | None = None):
    """Solve T x = b through the compressed Cauchy-like form of T.

    Returns (x, SolveReport).
    """
    options = options or SolveOptions()
    if eps is not None:
        options = SolveOptions(**{**asdict(options), "eps": eps})
    if options.format == "hodlr":
        raise FormatUnsupportedError("the HODLR format supports compression and matvec only; use format='hss' to solve")
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != T.n:
        raise LengthMismatchError(f"right-hand side has length {b.shape[0]}, expected {T.n}", got=b.shape[0], expected=T.n)
    times = {}
    t0 = time.perf_counter()
    Cop = to_cauchy_like(T)
    bt = apply_F(Cop.ctx, b)
    t1 = time.perf_counter()
    A = compress_cauchy(Cop, options)
    t2 = time.perf_counter()
    try:
        F = ulv_factor(A)
    except SingularBlockError as exc:
        raise NumericallySingularError(str(exc), **exc.details) from exc
    t3 = time.perf_counter()
    xt = ulv_solve(F, bt)
    t4 = time.perf_counter()
    x = apply_F_adjoint(Cop.ctx, xt)
    t5 = time.perf_counter()
    times.update(transform=t1 - t0, compress=t2 - t1, factor=t3 - t2, solve=t4 - t3, back_transform=t5 - t4)
    report = SolveReport(T.n, Cop.rho, options.eps, options.format, times, rank_summary(A))
    if options.verify:
        report.verification = verify_solution(T, b, x)
    return x, report


def verify_solution(T: ToeplitzOperator, b, x) -> dict:
    """Residual of T x - b and, under the dense guard, distance to a dense solve."""
    from .oracle import SOLVE_GUARD, dense_solve
    from .toeplitz import dense_toeplitz

    out = {}
    if T.n <= SOLVE_GUARD:
        Td = dense_toeplitz(T)
        out["relative_residual"] = float(np.linalg.norm(Td @ x - b) / max(np.linalg.norm(b), np.finfo(float).tiny))
        xd = dense_solve(Td, b)
        out["relative_error"] = float(np.linalg.norm(x - xd) / max(np.linalg.norm(xd), np.finfo(float).tiny))
    return out
