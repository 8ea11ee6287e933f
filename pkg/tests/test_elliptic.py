import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tzsolve.elliptic import elliptic_K_from_complement, jacobi_dn, jacobi_sncndn
from tzsolve.errors import DomainError

mpmath.mp.dps = 40


def _mp_K(kc):
    kc = mpmath.mpf(kc)
    return mpmath.ellipk(1 - kc * kc)


def _mp_dn(u, kc):
    kc = mpmath.mpf(kc)
    return mpmath.ellipfun("dn", mpmath.mpf(u), m=1 - kc * kc)


def test_K_special_values():
    assert elliptic_K_from_complement(1.0) == pytest.approx(np.pi / 2, rel=1e-15)
    assert elliptic_K_from_complement(2**-0.5) == pytest.approx(1.8540746773013719, rel=1e-14)
    K = elliptic_K_from_complement(1e-8)
    assert 19.0 <= K <= 20.5
    assert K == pytest.approx(np.log(4 / 1e-8), rel=1e-10)


@pytest.mark.parametrize("kc", [0.0, -1.0, 1.5, float("nan")])
def test_domain(kc):
    with pytest.raises(DomainError):
        elliptic_K_from_complement(kc)
    with pytest.raises(DomainError):
        jacobi_dn(0.3, kc)


def test_dn_trivial_values():
    for kc in (1e-10, 1e-3, 0.5, 1.0):
        assert jacobi_dn(0.0, kc) == pytest.approx(1.0, abs=1e-15)
        K = elliptic_K_from_complement(kc)
        assert jacobi_dn(K, kc) == pytest.approx(kc, rel=1e-12)
    u = np.linspace(-3, 3, 11)
    np.testing.assert_allclose(jacobi_dn(u, 1.0), 1.0, atol=1e-15)


def test_against_mpmath_sweep():
    r = np.random.default_rng(2024)
    kcs = 10.0 ** r.uniform(-10, 0, 200)
    worst_K = worst_dn = 0.0
    for kc in kcs:
        K = elliptic_K_from_complement(kc)
        worst_K = max(worst_K, abs(K - float(_mp_K(kc))) / float(_mp_K(kc)))
        u = r.uniform(0, K, 5)
        dn = jacobi_dn(u, kc)
        ref = np.array([float(_mp_dn(x, kc)) for x in u])
        worst_dn = max(worst_dn, float(np.max(np.abs(dn - ref) / ref)))
    assert worst_K <= 1e-14
    assert worst_dn <= 1e-13


@settings(max_examples=100, deadline=None)
@given(st.floats(-20, 20), st.floats(1e-10, 1.0))
def test_pythagorean_identity(u, kc):
    sn, cn, dn = jacobi_sncndn(u, kc)
    k2 = (1 - kc) * (1 + kc)
    assert abs(dn**2 + k2 * sn**2 - 1) <= 1e-12
    assert abs(sn**2 + cn**2 - 1) <= 1e-12
