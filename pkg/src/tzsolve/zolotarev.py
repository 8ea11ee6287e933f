"""Arc geometry of (m, sep) blocks, optimal ADI shifts and a priori bounds.

A block whose columns span ``m`` consecutive nodes and whose rows keep a
distance of at least ``sep`` indices (cyclically) has node sets inside two
arcs of the unit circle.  After rotating the narrow arc to be centred at 1
these are ``A_K = {e^{it}: |t| <= alpha}`` and
``A_J = {e^{it}: beta <= t <= 2 pi - beta}``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .elliptic import elliptic_K_from_complement, jacobi_dn
from .errors import DomainError, GeometryViolationError, MapValidationError

EPS_MIN = 1e-15
EPS_MAX = 0.5
MAP_TOL = 1e-10


def clamp_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"tolerance must lie in (0, 1), got {eps}")
    if eps < EPS_MIN or eps > EPS_MAX:
        clamped = min(max(eps, EPS_MIN), EPS_MAX)
        warnings.warn(f"tolerance {eps:g} clamped to {clamped:g}", RuntimeWarning, stacklevel=2)
        return clamped
    return eps


@dataclass(frozen=True)
class ArcGeometry:
    n: int
    m: int
    sep: int
    alpha: float
    beta: float
    kappa: float
    gamma: float
    delta: float
    comp_param: float  # 1 / gamma^2
    shift_kc: float  # 1 / delta, complementary modulus of the shift problem
    rel_gap: float

    @property
    def gamma_from_sines(self) -> float:
        return (math.sin(0.5 * (self.beta + self.alpha)) / math.sin(0.5 * (self.beta - self.alpha))) ** 2


def arc_geometry(n: int, m: int, sep: int) -> ArcGeometry:
    if m < 2 or sep < 1:
        raise GeometryViolationError(f"need m >= 2 and sep >= 1, got m={m}, sep={sep}")
    if n < 2 * (m + sep - 1):
        raise GeometryViolationError(f"n={n} < 2(m + sep - 1) for m={m}, sep={sep}")
    alpha = math.pi * (m - 1) / n
    beta = math.pi * (m - 1 + 2 * sep) / n
    kappa = math.tan(0.5 * alpha) / math.tan(0.5 * beta)
    ratio = (1.0 + kappa) / (1.0 - kappa)
    gamma = ratio * ratio
    gamma_minus_one = 4.0 * kappa / (1.0 - kappa) ** 2
    delta = 1.0 + 2.0 * gamma_minus_one + 2.0 * math.sqrt(gamma * gamma_minus_one)
    return ArcGeometry(
        n=n,
        m=m,
        sep=sep,
        alpha=alpha,
        beta=beta,
        kappa=kappa,
        gamma=gamma,
        delta=delta,
        comp_param=((1.0 - kappa) / (1.0 + kappa)) ** 4,
        shift_kc=1.0 / delta,
        rel_gap=0.5 * (1.0 / kappa - 1.0),
    )


@dataclass(frozen=True)
class MobiusMap:
    """z -> (a z + b) / (c z + d)."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate Mobius map")

    @classmethod
    def from_matrix(cls, M) -> "MobiusMap":
        return cls(complex(M[0, 0]), complex(M[0, 1]), complex(M[1, 0]), complex(M[1, 1]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @classmethod
    def from_three_points(cls, z, w) -> "MobiusMap":
        """Unique map with z[i] -> w[i] for three distinct finite points."""

        def to_standard(p):
            p1, p2, p3 = p
            # p1 -> 0, p2 -> 1, p3 -> infinity
            return np.array([[p2 - p3, -p1 * (p2 - p3)], [p2 - p1, -p3 * (p2 - p1)]], dtype=complex)

        return cls.from_matrix(np.linalg.solve(to_standard(w), to_standard(z)))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """self o other."""
        return MobiusMap.from_matrix(self.matrix @ other.matrix)


def build_T1(geom: ArcGeometry) -> MobiusMap:
    """Map [-delta, -1] u [1, delta] onto A_J u A_K (canonical frame)."""
    d = geom.delta
    ea, eb = np.exp(1j * geom.alpha), np.exp(1j * geom.beta)
    T1 = MobiusMap.from_three_points((1.0, d, -1.0), (ea, np.conj(ea), eb))
    resid = abs(T1(-d) - np.conj(eb))
    if not resid <= MAP_TOL:
        raise MapValidationError(f"fourth-point check failed, residual {resid:.3e}", residual=float(resid))
    return T1


@dataclass(frozen=True)
class ShiftSchedule:
    """ADI shifts: zeros ``taus`` sit on the row-node arc, poles ``nus`` on the
    column-node arc.  ``rotation`` carries the canonical frame to the block."""

    taus: np.ndarray
    nus: np.ndarray
    rotation: complex = 1.0

    @property
    def k(self) -> int:
        return self.taus.shape[0]

    def swapped(self) -> "ShiftSchedule":
        return ShiftSchedule(self.nus, self.taus, self.rotation)

    def rotated(self, rotation: complex) -> "ShiftSchedule":
        return ShiftSchedule(self.taus * rotation, self.nus * rotation, self.rotation * rotation)


@lru_cache(maxsize=4096)
def canonical_shifts(n: int, m: int, sep: int, k: int) -> ShiftSchedule:
    """Zolotarev zeros on A_J and poles on A_K, centred frame."""
    k = max(int(k), 1)
    geom = arc_geometry(n, m, sep)
    T1 = build_T1(geom)
    kc = geom.shift_kc
    K = elliptic_K_from_complement(kc)
    u = (2.0 * np.arange(1, k + 1) - 1.0) / (2.0 * k) * K
    dn = jacobi_dn(u, kc)
    taus = T1(-geom.delta * dn)
    nus = T1(geom.delta * dn)
    # Points lie on the unit circle up to rounding; project exactly.
    taus = taus / np.abs(taus)
    nus = nus / np.abs(nus)
    taus.setflags(write=False)
    nus.setflags(write=False)
    return ShiftSchedule(taus, nus, 1.0)


def arc_rotation(n: int, start: int, m: int) -> complex:
    """Unit scalar moving the centre of nodes start..start+m-1 to angle 0."""
    return np.exp(1j * np.pi * (2 * start + m - 1) / n)


def block_shifts(n: int, start: int, m: int, sep: int, k: int, narrow_side: str = "col") -> ShiftSchedule:
    """Shifts for a block whose narrow side covers nodes start..start+m-1.

    ``narrow_side`` says whether those contiguous indices are the block's
    columns ("col") or its rows ("row").
    """
    sched = canonical_shifts(n, m, sep, k)
    if narrow_side == "row":
        sched = sched.swapped()
    elif narrow_side != "col":
        raise ValueError(f"narrow_side must be 'row' or 'col', got {narrow_side!r}")
    return sched.rotated(arc_rotation(n, start, m))


def _as_cyclic_range(idx, n):
    """(start, width) of a cyclically contiguous index set, else None."""
    idx = np.unique(np.asarray(idx, dtype=np.intp) % n)
    if idx.size == 0:
        return None
    if idx.size == n:
        return 0, n
    gaps = np.diff(np.concatenate([idx, [idx[0] + n]]))
    big = np.nonzero(gaps > 1)[0]
    if big.size != 1:
        return None
    start = idx[(big[0] + 1) % idx.size]
    return int(start), int(idx.size)


def zolotarev_shifts(n: int, row_range, col_range, sep: int, k: int) -> ShiftSchedule:
    """Shifts for the block C[row_range, col_range].

    The narrower of the two index sets must be cyclically contiguous; its
    width is the block's ``m``.
    """
    rows = _as_cyclic_range(row_range, n)
    cols = _as_cyclic_range(col_range, n)
    cand = []
    if cols is not None:
        cand.append((cols[1], "col", cols))
    if rows is not None:
        cand.append((rows[1], "row", rows))
    if not cand:
        raise GeometryViolationError("neither index set is contiguous")
    _, side, (start, m) = min(cand, key=lambda c: c[0])
    return block_shifts(n, start, m, sep, k, narrow_side=side)


def rational_values(sched: ShiftSchedule, z) -> np.ndarray:
    """r_k(z) = prod (z - tau_j) / (z - nu_j)."""
    z = np.asarray(z, dtype=complex)
    out = np.ones_like(z)
    for t, v in zip(sched.taus, sched.nus):
        out = out * (z - t) / (z - v)
    return out


def certificate_ratio(sched: ShiftSchedule, row_points, col_points) -> float:
    """max |r_k| over row points divided by min |r_k| over column points."""
    return float(np.max(np.abs(rational_values(sched, row_points))) / np.min(np.abs(rational_values(sched, col_points))))


def arc_samples(geom: ArcGeometry, count: int, rotation: complex = 1.0):
    """Sample points on A_J and A_K (rotated)."""
    tJ = np.linspace(geom.beta, 2 * np.pi - geom.beta, count)
    tK = np.linspace(-geom.alpha, geom.alpha, count)
    return rotation * np.exp(1j * tJ), rotation * np.exp(1j * tK)


def xi_value(m: int, sep: int, n: int | None = None, use_gap_refinement: bool = False) -> float:
    if use_gap_refinement:
        if n is None:
            raise ValueError("the gap refinement needs n")
        kappa = arc_geometry(n, m, sep).kappa
        fraction = (1.0 + kappa) / (1.0 - kappa)
    else:
        fraction = (m + sep - 1) / sep
    return math.exp(math.pi**2 / (2.0 * math.log(4.0 * fraction)))


def zolotarev_bound(m: int, sep: int, k: int, use_gap_refinement: bool = False, n: int | None = None) -> float:
    """4 xi^(-k): bound on the Zolotarev number of the block's arcs."""
    return 4.0 * xi_value(m, sep, n, use_gap_refinement) ** (-k)


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"tolerance must lie in (0, 1), got {eps}")
    return eps


def epsilon_rank_bound(rho: int, m: int, sep: int, eps: float) -> int:
    eps = _check_eps(eps)
    val = 2.0 / math.pi**2 * math.log(4.0 * (m + sep - 1) / sep) * math.log(4.0 / eps)
    return rho * math.ceil(val)


def fadi_iteration_count(m: int, eps_v: float) -> int:
    eps_v = _check_eps(eps_v)
    val = 2.0 / math.pi**2 * math.log(4.0 * m) * math.log(4.0 / eps_v)
    return max(1, math.ceil(val))


def hss_rank_bound(rho: int, n: int, eps: float) -> int:
    eps = _check_eps(eps)
    return rho * math.ceil(2.0 / math.pi**2 * math.log(2.0 * n) * math.log(4.0 / eps))
