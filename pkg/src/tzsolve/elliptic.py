"""Complete elliptic integral K and Jacobi elliptic functions.

Both are parameterised by the complementary modulus ``kc = sqrt(1 - k^2)``
so that moduli extremely close to one never pass through ``1 - k^2`` in
floating point.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError

_AGM_TOL = 1e-15
_LANDEN_TOL = 1e-8  # sqrt of double precision: one more step is exact
_MAX_STEPS = 40


def _check_kc(kc: float) -> float:
    kc = float(kc)
    if not kc > 0.0 or not np.isfinite(kc):
        raise DomainError(f"complementary modulus must be positive, got {kc}")
    if kc > 1.0:
        raise DomainError(f"complementary modulus must be <= 1, got {kc}")
    return kc


def agm(a: float, b: float) -> float:
    for _ in range(_MAX_STEPS):
        if abs(a - b) <= _AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return 0.5 * (a + b)


def elliptic_K_from_complement(kc: float) -> float:
    """K(k) = pi / (2 AGM(1, kc))."""
    kc = _check_kc(kc)
    return np.pi / (2.0 * agm(1.0, kc))


def _sncndn_core(u: np.ndarray, kc: float):
    # Bulirsch's descending Landen scheme (parameter emc = kc^2).
    a = 1.0
    emc = kc * kc
    em, en = [], []
    c = 1.0
    for _ in range(_MAX_STEPS):
        em.append(a)
        emc = np.sqrt(emc)
        en.append(emc)
        c = 0.5 * (a + emc)
        if abs(a - emc) <= _LANDEN_TOL * a:
            break
        emc *= a
        a = c
    tiny = np.abs(u) < 1e-8
    u = u * c
    sn = np.sin(u)
    cn = np.cos(u)
    dn = np.ones_like(u)
    # below 1e-8 the series sn = u, cn = dn = 1 is exact in double
    sn[tiny] = u[tiny] / c
    cn[tiny] = 1.0
    nz = ~tiny
    if np.any(nz):
        s = sn[nz]
        aa = cn[nz] / s
        cc = c * aa
        d = np.ones_like(aa)
        for b, e in zip(reversed(em), reversed(en)):
            aa = aa * cc
            cc = cc * d
            d = (e + aa) / (b + aa)
            aa = cc / b
        aa = 1.0 / np.sqrt(cc * cc + 1.0)
        s = np.where(s >= 0.0, aa, -aa)
        sn[nz] = s
        cn[nz] = cc * s
        dn[nz] = d
    return sn, cn, dn


def jacobi_sncndn(u, kc: float):
    """sn, cn, dn of real ``u`` for complementary modulus ``kc``.

    Arguments are reduced to [0, K]; on (K/2, K] the reflection
    ``dn(K - t) = kc / dn(t)`` keeps dn accurate in the relative sense
    when kc is tiny.
    """
    kc = _check_kc(kc)
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 0
    u = np.atleast_1d(u).copy()
    if kc == 1.0:
        one = np.ones_like(u)
        out = (np.sin(u), np.cos(u), one)
        return tuple(x[0] for x in out) if scalar else out

    K = elliptic_K_from_complement(kc)
    r = np.mod(u, 4.0 * K)
    sgn_sn = np.ones_like(r)
    sgn_cn = np.ones_like(r)
    upper = r >= 2.0 * K
    r[upper] -= 2.0 * K
    sgn_sn[upper] = -1.0
    sgn_cn[upper] = -1.0
    second = r > K
    r[second] = 2.0 * K - r[second]
    sgn_cn[second] *= -1.0

    sn = np.empty_like(r)
    cn = np.empty_like(r)
    dn = np.empty_like(r)
    low = r <= 0.5 * K
    if np.any(low):
        sn[low], cn[low], dn[low] = _sncndn_core(r[low], kc)
    hi = ~low
    if np.any(hi):
        s, c, d = _sncndn_core(K - r[hi], kc)
        sn[hi] = c / d
        cn[hi] = kc * s / d
        dn[hi] = kc / d
    sn *= sgn_sn
    cn *= sgn_cn
    if scalar:
        return sn[0], cn[0], dn[0]
    return sn, cn, dn


def jacobi_dn(u, kc: float):
    return jacobi_sncndn(u, kc)[2]
