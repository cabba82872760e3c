"""Parabolic-cylinder model problem: nu(q), beta12, beta21 and m1^X(q)."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .numkit import gamma_polar

SQRT_2PI = math.sqrt(2 * math.pi)


def nu_q(q: complex) -> float:
    a2 = abs(q) ** 2
    if a2 >= 1:
        raise ValidationError(f"|q| must be < 1, got {abs(q)}", field="q")
    return -math.log1p(-a2) / (2 * math.pi)


@dataclass(frozen=True)
class CrossCoefficients:
    q: complex
    nu_q: float
    beta12: complex
    beta21: complex
    m1X: np.ndarray


def cross_coefficients(q: complex) -> CrossCoefficients:
    q = complex(q)
    if abs(q) >= 1:
        raise ValidationError(f"|q| must be < 1, got {abs(q)}", field="q")
    if q == 0:
        raise ValidationError("q = 0 is degenerate (beta formulas divide by q)", field="q")
    nu = nu_q(q)
    modulus, arg = gamma_polar(nu)
    gamma_i = cmath.rect(modulus, arg)
    gamma_minus_i = gamma_i.conjugate()  # Gamma(-i nu) as the conjugate of Gamma(i nu)
    beta12 = SQRT_2PI * cmath.exp(-1j * math.pi / 4) * math.exp(-5 * math.pi * nu / 2) / (q.conjugate() * gamma_minus_i)
    beta21 = SQRT_2PI * cmath.exp(1j * math.pi / 4) * math.exp(3 * math.pi * nu / 2) / (q * gamma_i)
    m1 = np.zeros((3, 3), dtype=complex)
    m1[0, 1] = beta12
    m1[1, 0] = beta21
    return CrossCoefficients(q, nu, beta12, beta21, m1)
