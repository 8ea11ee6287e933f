"""Dense reference numerics for tests and ``--verify``.

Correctness first: a one-sided (Hestenes) Jacobi SVD, LU solves and a
block power method for spectral norms.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import SingularMatrixError, SizeGuardError

SVD_GUARD = 2048
SOLVE_GUARD = 4096


def _round_robin(n: int):
    """Tournament schedule: n - 1 rounds of n / 2 disjoint pairs (n even)."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        p = np.array(players[:half])
        q = np.array(players[half:][::-1])
        rounds.append((np.minimum(p, q), np.maximum(p, q)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _jacobi_sweeps(A: np.ndarray, V: np.ndarray | None, tol: float, max_sweeps: int):
    n = A.shape[1]
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        off = 0.0
        for p, q in rounds:
            ap, aq = A[:, p], A[:, q]
            alpha = np.einsum("ij,ij->j", ap.conj(), ap).real
            beta = np.einsum("ij,ij->j", aq.conj(), aq).real
            gamma = np.einsum("ij,ij->j", ap.conj(), aq)
            mag = np.abs(gamma)
            scale = np.sqrt(alpha * beta)
            with np.errstate(invalid="ignore", divide="ignore"):
                rel = np.where(scale > 0, mag / scale, 0.0)
            off = max(off, float(rel.max(initial=0.0)))
            act = rel > tol
            if not act.any():
                continue
            p, q = p[act], q[act]
            ap, aq = ap[:, act], aq[:, act]
            alpha, beta, gamma, mag = alpha[act], beta[act], gamma[act], mag[act]
            phase = gamma / mag
            zeta = (beta - alpha) / (2.0 * mag)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            # J = diag(1, conj(phase)) [[c, s], [-s, c]]
            A[:, p] = c * ap - s * phase.conj() * aq
            A[:, q] = s * ap + c * phase.conj() * aq
            if V is not None:
                vp, vq = V[:, p], V[:, q]
                V[:, p] = c * vp - s * phase.conj() * vq
                V[:, q] = s * vp + c * phase.conj() * vq
        if off <= tol:
            break
    return A, V


def _check_guard(A: np.ndarray) -> None:
    if min(A.shape) > SVD_GUARD:
        raise SizeGuardError(f"min dimension {min(A.shape)} exceeds SVD guard {SVD_GUARD}")


def jacobi_svd(A, compute_vectors: bool = True, tol: float = 1e-15, max_sweeps: int = 60):
    """Thin SVD ``A = U diag(s) V^*`` with descending ``s``."""
    A = np.asarray(A, dtype=complex)
    _check_guard(A)
    m, n = A.shape
    if m < n:
        out = jacobi_svd(A.conj().T, compute_vectors, tol, max_sweeps)
        if not compute_vectors:
            return out
        U, s, V = out
        return V, s, U
    if n == 0:
        return (np.zeros((m, 0)), np.zeros(0), np.zeros((0, 0))) if compute_vectors else np.zeros(0)
    # Pivoted QR, then Jacobi on R^*: the graded factor converges in few sweeps.
    Q, R, perm = scipy.linalg.qr(A, mode="economic", pivoting=True)
    work = np.array(R.conj().T, dtype=complex)
    pad = n % 2
    if pad:
        work = np.hstack([work, np.zeros((n, 1), dtype=complex)])
    V = np.eye(work.shape[1], dtype=complex) if compute_vectors else None
    work, V = _jacobi_sweeps(work, V, tol, max_sweeps)
    s = np.linalg.norm(work, axis=0)
    order = np.argsort(-s, kind="stable")
    if pad:
        order = order[order != n][:n]
    s = s[order]
    if not compute_vectors:
        return s
    W = work[:, order]
    with np.errstate(invalid="ignore", divide="ignore"):
        Ur = np.where(s > 0, W / np.where(s > 0, s, 1.0), 0.0)
    # R^* = Ur diag(s) Vr^*  =>  A[:, perm] = Q Vr diag(s) Ur^*
    Vfull = np.zeros((n, n), dtype=complex)
    Vfull[perm] = Ur
    return Q @ V[:n, order], s, Vfull


def singular_values(A) -> np.ndarray:
    return jacobi_svd(A, compute_vectors=False)


def epsilon_rank(A=None, eps: float = 1e-8, sigma=None) -> int:
    """Smallest k with sigma_{k+1} <= eps * sigma_1 (sigma_{min+1} = 0)."""
    s = singular_values(A) if sigma is None else np.asarray(sigma)
    if s.size == 0 or s[0] == 0.0:
        return 0
    above = np.nonzero(s > eps * s[0])[0]
    return int(above[-1] + 1)


def dense_solve(A, b) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("dense_solve needs a square matrix")
    if A.shape[0] > SOLVE_GUARD:
        raise SizeGuardError(f"n={A.shape[0]} exceeds solve guard {SOLVE_GUARD}")
    lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    d = np.abs(np.diag(lu))
    if d.size and (d.min() == 0.0 or d.min() <= 1e-300 * max(d.max(), 1e-300)):
        raise SingularMatrixError("exactly singular pivot in LU factorization")
    return scipy.linalg.lu_solve((lu, piv), np.asarray(b, dtype=complex))


def spectral_norm(A=None, iters: int = 30, *, matvec=None, rmatvec=None, shape=None,
                  block: int = 6, rtol: float = 1e-10, max_iters: int = 2000, seed: int = 0) -> float:
    """Largest singular value by block power iteration on A^* A.

    Accepts a dense matrix or a (matvec, rmatvec, shape) triple.  Runs at
    least ``iters`` steps and stops once the Ritz estimate settles to
    ``rtol``.
    """
    if A is not None:
        A = np.asarray(A, dtype=complex)
        shape = A.shape
        matvec = lambda X: A @ X  # noqa: E731
        rmatvec = lambda Y: A.conj().T @ Y  # noqa: E731
    m, n = shape
    if m == 0 or n == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    b = min(block, n)
    X = rng.standard_normal((n, b)) + 1j * rng.standard_normal((n, b))
    X, _ = np.linalg.qr(X)
    prev = -1.0
    est = 0.0
    for it in range(max_iters):
        Y = matvec(X)
        Wm = rmatvec(Y)
        # Rayleigh-Ritz on the current block
        H = X.conj().T @ Wm
        H = 0.5 * (H + H.conj().T)
        evals = np.linalg.eigvalsh(H)
        est = float(np.sqrt(max(evals[-1], 0.0)))
        if est == 0.0:
            return 0.0
        X, _ = np.linalg.qr(Wm)
        if it + 1 >= iters and abs(est - prev) <= rtol * est:
            break
        prev = est
    return est
