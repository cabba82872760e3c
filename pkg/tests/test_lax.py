from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boussinesq_ist.errors import ValidationError
from boussinesq_ist.lax import (
    A_CAL,
    B_CAL,
    OMEGA,
    OMEGA2,
    critical_points,
    eigenvalues,
    jump_matrix,
    lax_potential,
    p_matrix,
    p_pair,
    phases,
    potential_factors,
    sector_of,
)
from boussinesq_ist.numkit import det3, frob
from boussinesq_ist.profiles import gaussian_profile, make_profile

SQRT3 = math.sqrt(3)
nonzero_k = st.builds(complex, st.floats(-3, 3), st.floats(-3, 3)).filter(lambda k: abs(k) > 0.05)


def test_omega_exact():
    assert OMEGA == complex(-0.5, SQRT3 / 2)
    assert OMEGA2 == OMEGA.conjugate()
    assert abs(OMEGA**3 - 1) < 1e-15


def test_p_examples():
    P, P_inv = p_pair(1)
    assert det3(P) == pytest.approx(-3 * SQRT3 * 1j, abs=1e-14)
    assert det3(P) == pytest.approx(-5.19615j, abs=1e-5)
    assert frob(P @ P_inv - np.eye(3)) < 1e-14


def test_p_singular():
    with pytest.raises(ValidationError):
        p_pair(0)


@given(nonzero_k)
def test_det_p(k):
    P, P_inv = p_pair(k)
    expected = -3 * SQRT3 * 1j * k**3
    assert abs(det3(P) - expected) <= 1e-12 * abs(expected)
    cond = np.linalg.cond(P)
    assert frob(P @ P_inv - np.eye(3)) <= 1e-12 * cond


def test_zero_potential():
    p = make_profile("zero")
    for x, k in [(0.0, 1.0), (2.0, 0.3 + 0.4j)]:
        assert np.all(lax_potential(p, x, k) == 0)


@settings(deadline=None)
@given(st.floats(-5, 5), nonzero_k)
def test_potential_traceless_and_rank_one(x, k):
    p = gaussian_profile(0.1)
    U = lax_potential(p, x, k)
    assert abs(np.trace(U)) <= 1e-13 * max(1.0, frob(U))
    c, rho, sigma = potential_factors(k)
    a, b = p.lax_coefficients(x)
    assert frob(np.outer(c, a * rho + b * sigma) - U) <= 1e-12 * max(1.0, frob(U))
    # nilpotent: U^2 = 0
    assert frob(U @ U) <= 1e-12 * max(1.0, frob(U)) ** 2


def test_potential_against_direct_product():
    p = gaussian_profile(0.1, 1, 0)
    U = lax_potential(p, 0.0, 1.0)
    w = complex(-0.5, SQRT3 / 2)
    w2 = w * w
    P = np.array([[w, w2, 1], [w2, w, 1], [1, 1, 1]], complex)
    M = np.zeros((3, 3), complex)
    M[2, 0] = 0.0  # -v0 - u0' at x = 0
    M[2, 1] = -0.2
    oracle = np.linalg.solve(P, M @ P)
    assert np.max(np.abs(U - oracle)) < 1e-15


def test_phases_examples():
    ph = phases(3.0, 0)
    assert (ph.phi21, ph.phi31, ph.phi32) == (0, 0, 0)
    assert phases(2.0, 1.0).phi21 == pytest.approx(-1j * SQRT3, abs=1e-15)
    for zeta in (0.3, 1.0, 4.0):
        k0 = zeta / 2
        assert phases(zeta, k0).phi21 == pytest.approx(-1j * SQRT3 * k0**2, abs=1e-14)


@given(st.floats(-5, 5), nonzero_k)
def test_phase_identities(zeta, k):
    ph = phases(zeta, k)
    assert abs(ph.phi21 + ph.phi32 - ph.phi31) <= 1e-13 * max(1, abs(ph.phi31))
    assert abs(phases(zeta, OMEGA * k).phi21 - ph.phi32) <= 1e-13 * max(1, abs(ph.phi32))


@given(st.floats(0.1, 5), st.floats(0, 4))
def test_signature_spot_checks(zeta, u):
    k0 = zeta / 2
    k = k0 + u * cmath.exp(1j * math.pi / 4)
    ph = phases(zeta, k)
    assert ph.phi21.real == pytest.approx(-SQRT3 * u * u, abs=1e-12 * (1 + zeta + u) ** 2)
    expected = (9 * k0**2 + 6 * math.sqrt(2) * k0 * u + SQRT3 * u * u) / 2
    assert ph.phi32.real == pytest.approx(expected, abs=1e-12 * (1 + zeta + u) ** 2)


def test_critical_points():
    assert critical_points(2.0).k0 == 1.0
    cp = critical_points(1.0)
    assert cp.rotated == (OMEGA * 0.5, OMEGA2 * 0.5)
    for zeta in (0.5, 1.7):
        k0 = critical_points(zeta).k0
        h = 1e-5
        d = (phases(zeta, k0 + h).phi21 - phases(zeta, k0 - h).phi21) / (2 * h)
        assert abs(d) < 1e-10
    with pytest.raises(ValidationError):
        critical_points(0.0)
    with pytest.raises(ValidationError):
        critical_points(-1.0)


def test_sector_of():
    for j in range(1, 7):
        k = 0.7 * cmath.exp(1j * (j - 1) * math.pi / 3)
        assert sector_of(k) == j
    with pytest.raises(ValidationError):
        sector_of(1 + 1j)
    with pytest.raises(ValidationError):
        sector_of(0)


def _ray_point(j, rho):
    return rho * cmath.exp(1j * (j - 1) * math.pi / 3)


def test_jump_trivial_reflection():
    zero = lambda s: 0j
    for j in range(1, 7):
        v = jump_matrix(j, 1.0, 2.0, _ray_point(j, 0.8), zero, zero)
        assert np.all(v == np.eye(3))


def test_jump_sector_mismatch():
    zero = lambda s: 0j
    with pytest.raises(ValidationError):
        jump_matrix(2, 1.0, 2.0, 0.8, zero, zero)
    with pytest.raises(ValidationError):
        jump_matrix(7, 1.0, 2.0, 0.8, zero, zero)
    with pytest.raises(ValidationError):
        jump_matrix(1, 1.0, 0.0, 0.8, zero, zero)


def _samplers(rng):
    a1, a2 = rng.uniform(0.1, 0.9, 2)
    b1, b2, c1, c2 = rng.uniform(0.2, 2.0, 4)
    r1 = lambda s: a1 * math.exp(-b1 * s * s) * cmath.exp(1j * c1 * s)
    r2 = lambda s: a2 * math.exp(-b2 * s * s) * cmath.exp(1j * c2 * s)
    return r1, r2


def test_jump_unit_determinant():
    rng = np.random.default_rng(3)
    for _ in range(200):
        r1, r2 = _samplers(rng)
        j = int(rng.integers(1, 7))
        v = jump_matrix(j, rng.uniform(-3, 3), rng.uniform(0.1, 3), _ray_point(j, rng.uniform(0.05, 3)), r1, r2)
        assert abs(det3(v) - 1) < 1e-12


def symmetry_defects(rng, n):
    """Largest defects of the two symmetries on n random (x, t, k) triples."""
    A_inv = A_CAL.T
    worst_a = worst_b = 0.0
    for _ in range(n):
        r1, r2 = _samplers(rng)
        j = int(rng.integers(1, 7))
        rho = rng.uniform(0.05, 3)
        x, t = rng.uniform(-5, 5), rng.uniform(0.1, 5)
        k = _ray_point(j, rho)
        v = jump_matrix(j, x, t, k, r1, r2)
        kw = OMEGA * k
        vw = jump_matrix(sector_of(kw), x, t, kw, r1, r2)
        worst_a = max(worst_a, frob(v - A_CAL @ vw @ A_inv))
        kc = k.conjugate()
        vc = jump_matrix(sector_of(kc), x, t, kc, r1, r2)
        worst_b = max(worst_b, frob(v - B_CAL @ np.linalg.inv(vc.conj()) @ B_CAL))
    return worst_a, worst_b


def test_jump_symmetries():
    a, b = symmetry_defects(np.random.default_rng(11), 200)
    assert a < 1e-10 and b < 1e-10


def test_eigenvalues():
    l = eigenvalues(2.0)
    assert np.allclose(l, [2 * OMEGA, 2 * OMEGA2, 2])
    assert abs(l.sum()) < 1e-15
