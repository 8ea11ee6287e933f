"""Command-line interface: ``tzsolve solve|compress|ranks|bench|verify``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O
error.  Errors are reported as one JSON object on stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np
from scipy.linalg import matmul_toeplitz

from . import io as tio
from .errors import (
    MapValidationError,
    NumericallySingularError,
    ShiftCollisionError,
    SingularBlockError,
    SingularMatrixError,
    SizeGuardError,
    TzsolveError,
)
from .parallel import ENV_VAR, resolve_threads
from .pipeline import DEFAULT_EPS, SolveOptions, compress_toeplitz, solve_toeplitz
from .toeplitz import random_toeplitz
from .tree import DEFAULT_N_MIN, build_tree
from .zolotarev import epsilon_rank_bound

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
NUMERIC_ERRORS = (NumericallySingularError, SingularBlockError, SingularMatrixError, ShiftCollisionError, MapValidationError)
MEASURE_GUARD = 2048
VERIFY_GUARD = 2048


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _tol(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"tolerance must lie in (0, 1), got {v}")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _sizes(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tzsolve", description="Superfast Toeplitz solver via hierarchical Cauchy-like compression.")
    p.add_argument("--threads", type=_positive, default=None, help=f"internal parallelism (fallback: ${ENV_VAR})")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve T x = b")
    s.add_argument("--matrix", required=True)
    s.add_argument("--rhs", required=True)
    s.add_argument("--tol", type=_tol, default=DEFAULT_EPS)
    s.add_argument("--format", choices=["hss", "hodlr"], default="hss")
    s.add_argument("--n-min", type=_positive, default=DEFAULT_N_MIN)
    s.add_argument("--leaf-accel", action="store_true")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--out")

    c = sub.add_parser("compress", help="compress the Cauchy-like form of T and report statistics")
    c.add_argument("--matrix")
    c.add_argument("--n", type=_positive, help="random test matrix size when --matrix is absent")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--tol", type=_tol, default=DEFAULT_EPS)
    c.add_argument("--format", choices=["hss", "hodlr"], default="hss")
    c.add_argument("--n-min", type=_positive, default=DEFAULT_N_MIN)
    c.add_argument("--fast", action="store_true")
    c.add_argument("--leaf-accel", action="store_true")
    c.add_argument("--verify", action="store_true")
    c.add_argument("--stats")

    r = sub.add_parser("ranks", help="a-priori rank bounds of the HODLR blocks per level")
    r.add_argument("--n", type=_positive, required=True)
    r.add_argument("--rho", type=_positive, default=2)
    r.add_argument("--eps", type=_tol, default=DEFAULT_EPS)
    r.add_argument("--n-min", type=_positive, default=DEFAULT_N_MIN)
    r.add_argument("--measure", action="store_true", help="add dense eps-ranks of a random Cauchy-like matrix")
    r.add_argument("--seed", type=int, default=0)

    b = sub.add_parser("bench", help="time build and solve over sizes")
    b.add_argument("--sizes", type=_sizes, default=[1024, 2048, 4096])
    b.add_argument("--matrix")
    b.add_argument("--tol", type=_tol, default=DEFAULT_EPS)
    b.add_argument("--n-min", type=_positive, default=DEFAULT_N_MIN)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repeats", type=_positive, default=1)
    b.add_argument("--verify", action="store_true")

    v = sub.add_parser("verify", help="dense-oracle self check on a random instance")
    v.add_argument("--n", type=_positive, default=256)
    v.add_argument("--tol", type=_tol, default=1e-6)
    v.add_argument("--seed", type=int, default=0)
    return p


def _emit(obj, path=None) -> None:
    if path:
        tio.write_json(path, obj)
    else:
        sys.stdout.write(tio.dumps(obj) + "\n")


def _load_matrix(args):
    if getattr(args, "matrix", None):
        return tio.toeplitz_from_json(tio.read_json(args.matrix)), None
    if getattr(args, "n", None) is None:
        raise ConfigError("either --matrix or --n is required")
    return random_toeplitz(args.n, np.random.default_rng(args.seed)), args.seed


def _toeplitz_matvec(T, x):
    return matmul_toeplitz((T.col, T.row), x)


def cmd_solve(args) -> int:
    T = tio.toeplitz_from_json(tio.read_json(args.matrix))
    bvec = tio.rhs_from_json(tio.read_json(args.rhs))
    opts = SolveOptions(
        eps=args.tol,
        format=args.format,
        n_min=args.n_min,
        accelerate_leaves=args.leaf_accel,
        verify=args.verify,
        threads=args.threads,
    )
    x, report = solve_toeplitz(T, bvec, options=opts)
    _emit({"x": tio.encode_complex(x), "report": report.to_dict()}, args.out)
    return EXIT_OK


def cmd_compress(args) -> int:
    T, seed = _load_matrix(args)
    opts = SolveOptions(
        eps=args.tol,
        format=args.format,
        n_min=args.n_min,
        accelerate_leaves=args.leaf_accel,
        fast=args.fast,
        verify=args.verify,
        threads=args.threads,
    )
    _, _, stats = compress_toeplitz(T, opts)
    if seed is not None:
        stats["seed"] = seed
    _emit(stats, args.stats)
    return EXIT_OK


def cmd_ranks(args) -> int:
    tree = build_tree(args.n, min(args.n_min, args.n // 2))
    if args.measure and args.n > MEASURE_GUARD:
        raise SizeGuardError(f"--measure needs n <= {MEASURE_GUARD}", n=args.n, guard=MEASURE_GUARD)
    w = csv.writer(sys.stdout, lineterminator="\n")
    header = ["level", "m", "sep", "bound_rank"] + (["measured_rank"] if args.measure else [])
    w.writerow(header)
    C = None
    if args.measure:
        from .oracle import epsilon_rank
        from .spectral import cauchy_from_generators

        rng = np.random.default_rng(args.seed)
        shape = (args.n, args.rho)
        G = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        H = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        C = cauchy_from_generators(G, H, np.zeros(args.n))
    for lev in range(1, tree.depth + 1):
        v = 2**lev - 1
        m = tree.size(v)
        row = [lev, m, 1, epsilon_rank_bound(args.rho, m, 1, args.eps)]
        if C is not None:
            X = C.entries(tree.indices(v), tree.indices(tree.sibling(v)))
            row.append(epsilon_rank(X, args.eps))
        w.writerow(row)
    return EXIT_OK


def cmd_bench(args) -> int:
    w = csv.writer(sys.stdout, lineterminator="\n")
    sys.stdout.write(f"# seed={args.seed}\n")
    header = ["n", "build_s", "solve_s", "rank_max"] + (["resid"] if args.verify else [])
    w.writerow(header)
    if args.matrix:
        cases = [tio.toeplitz_from_json(tio.read_json(args.matrix))]
    else:
        cases = [random_toeplitz(n, np.random.default_rng(args.seed)) for n in args.sizes]
    rng_b = np.random.default_rng(args.seed + 1)
    opts = SolveOptions(eps=args.tol, n_min=args.n_min, threads=args.threads)
    for T in cases:
        bvec = rng_b.standard_normal(T.n) + 0j
        runs = []
        for _ in range(args.repeats):
            x, rep = solve_toeplitz(T, bvec, options=opts)
            build = rep.times["transform"] + rep.times["compress"]
            solve = rep.times["factor"] + rep.times["solve"] + rep.times["back_transform"]
            runs.append((build + solve, build, solve, rep.ranks["max_rank"], x))
        runs.sort(key=lambda r: r[0])
        _, build, solve, rmax, x = runs[len(runs) // 2]
        row = [T.n, f"{build:.6f}", f"{solve:.6f}", rmax]
        if args.verify:
            res = np.linalg.norm(_toeplitz_matvec(T, x) - bvec) / np.linalg.norm(bvec)
            row.append(f"{res:.3e}")
        w.writerow(row)
    return EXIT_OK


def run_verify_suite(n: int, tol: float, seed: int) -> list[dict]:
    """Dense-oracle checks on one random instance."""
    from .hodlr import hodlr_compress, hodlr_compress_fast
    from .hss import hss_compress, hss_to_dense
    from .spectral import dense_cauchy, dense_F, to_cauchy_like
    from .toeplitz import dense_toeplitz

    if n > VERIFY_GUARD:
        raise SizeGuardError(f"verify needs n <= {VERIFY_GUARD}", n=n, guard=VERIFY_GUARD)
    rng = np.random.default_rng(seed)
    T = random_toeplitz(n, rng)
    Td = dense_toeplitz(T)
    Cop = to_cauchy_like(T)
    Cd = dense_cauchy(Cop)
    Fd = dense_F(n)
    nC = np.linalg.norm(Cd, 2)
    tree = build_tree(n, min(DEFAULT_N_MIN, n // 2))
    checks = []

    def check(name, value, limit):
        checks.append({"check": name, "value": float(value), "limit": float(limit), "pass": bool(value <= limit)})

    check("F_unitary", np.abs(Fd.conj().T @ Fd - np.eye(n)).max(), 1e-14)
    check("cauchy_vs_FTF*", np.abs(Cd - Fd @ Td @ Fd.conj().T).max() / np.abs(Cd).max(), 1e-12)
    for name, fn in (("hodlr", hodlr_compress), ("hodlr_fast", hodlr_compress_fast)):
        A = fn(Cop, tree, tol)
        check(f"{name}_error", np.linalg.norm(Cd - A.to_dense(), 2) / nC, tol)
    H = hss_compress(Cop, tree, tol)
    check("hss_error", np.linalg.norm(Cd - hss_to_dense(H), 2) / nC, 10 * tol)
    b = rng.standard_normal(n) + 0j
    x, _ = solve_toeplitz(T, b, options=SolveOptions(eps=tol))
    resid = np.linalg.norm(Td @ x - b) / (np.linalg.norm(Td, 2) * np.linalg.norm(x) + np.linalg.norm(b))
    check("solve_backward_error", resid, 100 * tol)
    return checks


def cmd_verify(args) -> int:
    checks = run_verify_suite(args.n, args.tol, args.seed)
    for c in checks:
        sys.stdout.write(tio.dumps(c) + "\n")
    return EXIT_OK if all(c["pass"] for c in checks) else EXIT_NUMERIC


COMMANDS = {"solve": cmd_solve, "compress": cmd_compress, "ranks": cmd_ranks, "bench": cmd_bench, "verify": cmd_verify}


def _fail(code: int, payload: dict) -> int:
    sys.stderr.write(json.dumps(payload, default=str) + "\n")
    return code


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.threads = resolve_threads(args.threads)
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, {"error": "CONFIG", "message": str(exc)})
    except NUMERIC_ERRORS as exc:
        return _fail(EXIT_NUMERIC, exc.to_dict())
    except (OSError, json.JSONDecodeError, tio.FormatError, UnicodeDecodeError) as exc:
        return _fail(EXIT_IO, {"error": "IO", "message": str(exc)})
    except (TzsolveError, ValueError) as exc:
        payload = exc.to_dict() if isinstance(exc, TzsolveError) else {"error": "CONFIG", "message": str(exc)}
        return _fail(EXIT_CONFIG, payload)


def main() -> None:
    sys.exit(run())
