"""Factored ADI for ``D_J X - X D_K = G_J H_K^*`` with diagonal D_J, D_K."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShiftCollisionError
from .zolotarev import ShiftSchedule

COLLISION_TOL = 1e-14


@dataclass(frozen=True)
class DiagonalSylvester:
    dJ: np.ndarray
    dK: np.ndarray
    GJ: np.ndarray
    HK: np.ndarray

    def solution(self) -> np.ndarray:
        """Exact X entrywise (oracle support; needs disjoint spectra)."""
        return (self.GJ @ self.HK.conj().T) / (self.dJ[:, None] - self.dK[None, :])


@dataclass(frozen=True)
class LowRankFactors:
    Z: np.ndarray
    W: np.ndarray

    @property
    def rank(self) -> int:
        return self.Z.shape[1]

    def to_dense(self) -> np.ndarray:
        return self.Z @ self.W.conj().T


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    return a[:, None] if a.ndim == 1 else a


def _check_collision(d: np.ndarray, shift: complex, side: str, j: int) -> None:
    if d.size and np.min(np.abs(d - shift)) <= COLLISION_TOL * max(1.0, abs(shift)):
        raise ShiftCollisionError(
            f"shift {side}[{j}] = {shift:.16g} coincides with a diagonal entry",
            side=side,
            index=j,
        )


def fadi_row_factor(dJ, GJ, shifts: ShiftSchedule) -> np.ndarray:
    """Left factor Z of fADI; depends only on D_J, G_J and the shifts.

    Block j is ``(nu_j - tau_j) prod_{i<j} (D_J - tau_i) prod_{i<=j} (D_J - nu_i)^{-1} G_J``.
    The scalar ``nu_j - tau_j`` is applied to each block once rather than
    carried through the recurrence.
    """
    dJ = np.asarray(dJ, dtype=complex)
    GJ = _as_matrix(GJ)
    taus, nus = shifts.taus, shifts.nus
    k = taus.shape[0]
    rho = GJ.shape[1]
    Z = np.empty((dJ.shape[0], k * rho), dtype=complex)
    _check_collision(dJ, nus[0], "nu", 0)
    Yj = (1.0 / (dJ - nus[0]))[:, None] * GJ
    Z[:, :rho] = (nus[0] - taus[0]) * Yj
    for j in range(k - 1):
        _check_collision(dJ, nus[j + 1], "nu", j + 1)
        Yj = ((dJ - taus[j]) / (dJ - nus[j + 1]))[:, None] * Yj
        Z[:, (j + 1) * rho : (j + 2) * rho] = (nus[j + 1] - taus[j + 1]) * Yj
    return Z


def fadi_col_factor(dK, HK, shifts: ShiftSchedule) -> np.ndarray:
    """Right factor W of fADI; depends only on D_K, H_K and the shifts."""
    dK = np.asarray(dK, dtype=complex)
    HK = _as_matrix(HK)
    taus, nus = shifts.taus, shifts.nus
    k = taus.shape[0]
    rho = HK.shape[1]
    dKc = dK.conj()
    W = np.empty((dK.shape[0], k * rho), dtype=complex)
    _check_collision(dK, taus[0], "tau", 0)
    Wj = (1.0 / (dKc - np.conj(taus[0])))[:, None] * HK
    W[:, :rho] = Wj
    for j in range(k - 1):
        _check_collision(dK, taus[j + 1], "tau", j + 1)
        scale = (dKc - np.conj(nus[j])) / (dKc - np.conj(taus[j + 1]))
        Wj = scale[:, None] * Wj
        W[:, (j + 1) * rho : (j + 2) * rho] = Wj
    return W


def fadi(sys: DiagonalSylvester, shifts: ShiftSchedule) -> LowRankFactors:
    """k steps of fADI; X is approximated by Z W^* of rank k * rho."""
    Z = fadi_row_factor(sys.dJ, sys.GJ, shifts)
    W = fadi_col_factor(sys.dK, sys.HK, shifts)
    return LowRankFactors(Z, W)
