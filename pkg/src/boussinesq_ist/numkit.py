"""Small numerical kernel: 3x3 complex algebra, complex log-gamma and quadrature."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad_vec

from .errors import BudgetExceeded, GammaOverflow, ValidationError

DEFAULT_TOL = 1e-10
DEFAULT_BUDGET = 200_000

# ---------------------------------------------------------------------------
# 3x3 complex matrices (plain (3, 3) complex128 arrays)


def det3(m: np.ndarray) -> complex:
    """Cofactor expansion along the first row."""
    return complex(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def adjugate3(m: np.ndarray) -> np.ndarray:
    c = np.empty((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != i]
            cols = [q for q in range(3) if q != j]
            minor = m[rows[0], cols[0]] * m[rows[1], cols[1]] - m[rows[0], cols[1]] * m[rows[1], cols[0]]
            c[i, j] = (-1) ** (i + j) * minor
    return c.T


def inv3(m: np.ndarray) -> np.ndarray:
    d = det3(m)
    if d == 0:
        raise ValidationError("matrix is singular")
    return adjugate3(m) / d


def frob(m: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(m) ** 2)))


# ---------------------------------------------------------------------------
# Complex log-gamma

# B_{2m} / (2m (2m - 1)) for m = 1..10
_STIRLING = (
    1 / 12,
    -1 / 360,
    1 / 1260,
    -1 / 1680,
    1 / 1188,
    -691 / 360360,
    1 / 156,
    -3617 / 122400,
    43867 / 244188,
    -174611 / 125400,
)
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)
_SHIFT_RADIUS = 17.0


def log_gamma(z: complex) -> complex:
    """ln Gamma(z) by upward recurrence to |z| >= 17 and the Stirling series.

    The imaginary part is a continuous branch (sum of principal logarithms); only
    its value mod 2*pi is meaningful to callers that need arg Gamma(z).
    """
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise ValidationError(f"Gamma has a pole at {z.real:g}")
    shift = 0j
    w = z
    while abs(w) < _SHIFT_RADIUS or w.real < 1.0:
        shift += np.log(w)
        w += 1
    inv = 1 / w
    inv2 = inv * inv
    series = 0j
    power = inv
    for c in _STIRLING:
        series += c * power
        power *= inv2
    return (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + series - shift


def _wrap_angle(a: float) -> float:
    a = math.remainder(a, 2 * math.pi)
    return math.pi if a == -math.pi else a


GAMMA_OVERFLOW_NU = math.log(np.finfo(float).max) / math.pi


def gamma_polar(nu: float) -> tuple[float, float]:
    """Modulus and argument of Gamma(i nu) for nu > 0.

    The modulus uses the closed form sqrt(2 pi) / sqrt(nu (e^{pi nu} - e^{-pi nu}));
    the argument comes from :func:`log_gamma`.
    """
    nu = float(nu)
    if not nu > 0 or not math.isfinite(nu):
        raise ValidationError(f"nu must be positive, got {nu}", field="nu")
    if nu >= GAMMA_OVERFLOW_NU:
        raise GammaOverflow(nu, GAMMA_OVERFLOW_NU)
    modulus = math.sqrt(2 * math.pi) / math.sqrt(nu * (math.exp(math.pi * nu) - math.exp(-math.pi * nu)))
    arg = _wrap_angle(log_gamma(1j * nu).imag)
    return modulus, arg


# ---------------------------------------------------------------------------
# Quadrature


@dataclass(frozen=True)
class QuadResult:
    value: complex | float
    error_estimate: float
    evaluations: int


def adaptive_quad(
    f: Callable[[float], complex],
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    points: Sequence[float] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> QuadResult:
    """Globally adaptive Gauss-Kronrod quadrature of a real or complex integrand."""
    if not a < b:
        raise ValidationError(f"need a < b, got [{a}, {b}]")
    inner = None
    if points is not None:
        inner = [p for p in points if a < p < b]
    limit = max(budget // 21, 1)
    value, err, info = quad_vec(
        f, a, b, epsabs=tol, epsrel=tol, points=inner, limit=limit, full_output=True
    )
    if hasattr(value, "item") and np.ndim(value) == 0:
        value = value.item()
    if info.status != 0:
        raise BudgetExceeded(
            f"adaptive_quad did not converge on [{a}, {b}] ({info.message})", value, float(err)
        )
    return QuadResult(value, float(err), int(info.neval))


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _gauss_panel(h, lo: float, hi: float, n: int):
    x, w = gauss_legendre(n)
    s = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    return 0.5 * (hi - lo) * np.sum(w * np.asarray(h(s)))


def panel_quad(
    h: Callable[[np.ndarray], np.ndarray],
    edges: Sequence[float],
    tol: float = DEFAULT_TOL,
    budget: int = DEFAULT_BUDGET,
) -> QuadResult:
    """Integral of a vectorised integrand over the panels spanned by ``edges``.

    Each panel is integrated with 10- and 20-point Gauss-Legendre and bisected
    until the two rules agree to its share of the tolerance.
    """
    edges = np.asarray(edges, dtype=float)
    a, b = float(edges[0]), float(edges[-1])
    if not b > a:
        raise ValidationError(f"need a < b, got [{a}, {b}]")
    span = b - a
    stack = list(zip(edges[:-1], edges[1:]))
    total = 0.0
    err_total = 0.0
    evals = 0
    while stack:
        lo, hi = stack.pop()
        coarse = _gauss_panel(h, lo, hi, 10)
        fine = _gauss_panel(h, lo, hi, 20)
        evals += 30
        if evals > budget:
            raise BudgetExceeded("panel quadrature exceeded its budget", total + fine, float("inf"))
        err = abs(fine - coarse)
        allowed = tol * max(1.0, abs(fine)) * (hi - lo) / span
        if err <= allowed or hi - lo < 1e-14 * span:
            total += fine
            err_total += err
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid))
            stack.append((mid, hi))
    if hasattr(total, "item"):
        total = total.item()
    return QuadResult(total, float(err_total), evals)


def graded_mesh(k0: float, K: float, breakpoints: Sequence[float] | None = None, min_ratio: float = 1e-12):
    """Dyadic panels accumulating at k0, merged with optional breakpoints."""
    span = K - k0
    edges = [K]
    width = span
    while width > min_ratio * span:
        width *= 0.5
        edges.append(k0 + width)
    edges.append(k0)
    if breakpoints is not None:
        gap = min_ratio * span
        edges.extend(p for p in breakpoints if k0 + gap < p < K - gap)
    return np.unique(np.asarray(edges, dtype=float))


def log_singular_quad(
    g: Callable[[np.ndarray], np.ndarray],
    k0: float,
    K: float,
    tol: float = DEFAULT_TOL,
    breakpoints: Sequence[float] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> QuadResult:
    """Integral of ln|s - k0| g(s) over [k0, K] for smooth g (vectorised).

    Panels come from :func:`graded_mesh` and are refined by :func:`panel_quad`.
    """
    if not K > k0:
        raise ValidationError(f"need K > k0, got k0={k0}, K={K}")
    edges = graded_mesh(k0, K, breakpoints)
    return panel_quad(lambda s: np.log(np.abs(s - k0)) * np.asarray(g(s)), edges, tol, budget)
