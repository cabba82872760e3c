"""Algebra of the 3x3 Lax pair: P(k), the potential U(x, k), phases and jumps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError
from .numkit import adjugate3, det3
from .profiles import Profile

SQRT3 = math.sqrt(3.0)
# exact pair (-1/2, sqrt(3)/2); powers written out rather than computed by repeated products
OMEGA = complex(-0.5, SQRT3 / 2)
OMEGA2 = complex(-0.5, -SQRT3 / 2)
OMEGA_POWERS = (1 + 0j, OMEGA, OMEGA2)

# cyclic permutation and swap from the jump-matrix symmetries
A_CAL = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)
B_CAL = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)

RAY_TOL = 1e-12


def omega_pow(j: int) -> complex:
    return OMEGA_POWERS[j % 3]


def eigenvalues(k: complex) -> np.ndarray:
    """Diagonal of L(k): l_j = omega^j k for j = 1, 2, 3."""
    return np.array([OMEGA * k, OMEGA2 * k, k], dtype=complex)


def p_matrix(k: complex) -> np.ndarray:
    return np.array(
        [
            [OMEGA, OMEGA2, 1],
            [OMEGA2 * k, OMEGA * k, k],
            [k * k, k * k, k * k],
        ],
        dtype=complex,
    )


def p_pair(k: complex) -> tuple[np.ndarray, np.ndarray]:
    """P(k) and its inverse through the adjugate; det P(k) = -3 sqrt(3) i k^3."""
    k = complex(k)
    if k == 0:
        raise ValidationError("P(k) is singular at k = 0", field="k")
    p = p_matrix(k)
    return p, adjugate3(p) / det3(p)


def lax_potential(p: Profile, x: float, k: complex) -> np.ndarray:
    """U(x, k) = P^{-1} M(x) P with M nonzero only in row 3: (-v0 - u0x, -2 u0, 0)."""
    P, P_inv = p_pair(k)
    a, b = p.lax_coefficients(x)
    m = np.zeros((3, 3), dtype=complex)
    m[2, 0] = a
    m[2, 1] = b
    return P_inv @ m @ P


def potential_factors(k: complex) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rank-one factorisation U(x, k) = c (a(x) rho + b(x) sigma)^T.

    c is column 3 of P^{-1}, rho and sigma are rows 1 and 2 of P.
    """
    P, P_inv = p_pair(k)
    return P_inv[:, 2].copy(), P[0].copy(), P[1].copy()


@dataclass(frozen=True)
class PhaseTriple:
    phi21: complex
    phi31: complex
    phi32: complex


def phases(zeta: float, k: complex) -> PhaseTriple:
    return PhaseTriple(
        phi21=OMEGA * (OMEGA - 1) * k * (zeta - k),
        phi31=(1 - OMEGA) * k * (zeta - OMEGA2 * k),
        phi32=(1 - OMEGA2) * k * (zeta - OMEGA * k),
    )


@dataclass(frozen=True)
class CriticalPoints:
    k0: float
    rotated: tuple[complex, complex]


def critical_points(zeta: float) -> CriticalPoints:
    if not zeta > 0:
        raise ValidationError(f"zeta must be positive (right half-plane sector), got {zeta}", field="zeta")
    k0 = zeta / 2
    return CriticalPoints(k0, (OMEGA * k0, OMEGA2 * k0))


# Contour Gamma: rays labelled 1..6 at angles 0, pi/3, ..., 5pi/3 (k = rho e^{i theta}, rho > 0)
SECTOR_ANGLES = {j: (j - 1) * math.pi / 3 for j in range(1, 7)}


def sector_of(k: complex) -> int:
    """Label of the ray of Gamma that contains k (k != 0)."""
    if k == 0:
        raise ValidationError("k = 0 lies on every ray", field="k")
    theta = math.atan2(k.imag, k.real) % (2 * math.pi)
    j = int(round(theta / (math.pi / 3))) % 6 + 1
    ang = SECTOR_ANGLES[j]
    if abs(k - abs(k) * complex(math.cos(ang), math.sin(ang))) > RAY_TOL * max(1.0, abs(k)):
        raise ValidationError(f"k = {k} is not on the contour", field="k")
    return j


def _conj(z: complex) -> complex:
    return complex(z).conjugate()


def jump_matrix(
    sector: int,
    x: float,
    t: float,
    k: complex,
    r1: Callable[[complex], complex],
    r2: Callable[[complex], complex],
) -> np.ndarray:
    """Jump matrix v_j of the original RH problem on ray ``sector``.

    ``r1``/``r2`` are caller-supplied samplers; they are called only at the real
    arguments the formula needs (k, omega k or omega^2 k, depending on the ray).
    Diagnostic only.
    """
    k = complex(k)
    if sector not in SECTOR_ANGLES:
        raise ValidationError(f"sector must be in 1..6, got {sector}", field="sector")
    if sector_of(k) != sector:
        raise ValidationError(f"k = {k} does not lie on ray {sector}", field="sector")
    if not t > 0:
        raise ValidationError("t must be positive", field="t")
    zeta = x / t
    ph = phases(zeta, k)
    e21, e31, e32 = np.exp(t * ph.phi21), np.exp(t * ph.phi31), np.exp(t * ph.phi32)
    v = np.eye(3, dtype=complex)

    def real_arg(z: complex) -> float:
        return z.real

    if sector == 1:
        q = r1(real_arg(k))
        v[0, 1] = -q / e21
        v[1, 0] = _conj(q) * e21
        v[1, 1] = 1 - abs(q) ** 2
    elif sector == 2:
        q = r2(real_arg(OMEGA * k))
        v[1, 1] = 1 - abs(q) ** 2
        v[1, 2] = -_conj(q) / e32
        v[2, 1] = q * e32
    elif sector == 3:
        q = r1(real_arg(OMEGA2 * k))
        v[0, 0] = 1 - abs(q) ** 2
        v[0, 2] = _conj(q) / e31
        v[2, 0] = -q * e31
    elif sector == 4:
        q = r2(real_arg(k))
        v[0, 0] = 1 - abs(q) ** 2
        v[0, 1] = -_conj(q) / e21
        v[1, 0] = q * e21
    elif sector == 5:
        q = r1(real_arg(OMEGA * k))
        v[1, 2] = -q / e32
        v[2, 1] = _conj(q) * e32
        v[2, 2] = 1 - abs(q) ** 2
    else:
        q = r2(real_arg(OMEGA2 * k))
        v[0, 2] = q / e31
        v[2, 0] = -_conj(q) * e31
        v[2, 2] = 1 - abs(q) ** 2
    return v
