"""Long-time asymptotics of u on rays x = zeta t inside the validity sector.

The spectral density f(s) = ln(1 - |r1(s)|^2) is represented by a piecewise
cubic Hermite interpolant of the sampled values and their finite-difference
derivatives, so that the Cauchy integral defining delta1 and the Stieltjes
integrals against d f = l'(s) ds use one and the same density.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import CoverageError, SectorError, ValidationError
from .lax import OMEGA
from .numkit import DEFAULT_TOL, adaptive_quad, gamma_polar, graded_mesh, log_singular_quad, panel_quad
from .scatter import SpectralLine, compute_zeta0

DEFAULT_MARGIN = 0.05
DEFAULT_EPSILON = 1e-3
T_MIN = 2.0


def nu_of(abs_q2: float) -> float:
    abs_q2 = float(abs_q2)
    if abs_q2 < 0:
        raise ValidationError(f"|q|^2 must be nonnegative, got {abs_q2}", field="abs_q2")
    if abs_q2 >= 1:
        raise SectorError(f"|q|^2 = {abs_q2} >= 1: ray lies in the |r1| >= 1 region", field="abs_q2")
    return -math.log1p(-abs_q2) / (2 * math.pi)


def ln0(z):
    """Logarithm with arg in (0, 2 pi] (cut along the positive real axis)."""
    z = np.asarray(z, dtype=complex)
    ang = np.angle(z)
    ang = np.where(ang <= 0, ang + 2 * np.pi, ang)
    return np.log(np.abs(z)) + 1j * ang


class LogDensity:
    """f(s) = ln(1 - |r1(s)|^2) and f'(s) on [k_lo, K] from a spectral line."""

    def __init__(self, line: SpectralLine, k_lo: float | None = None):
        k = line.k_grid
        finite = np.isfinite(line.log1m) & np.isfinite(line.ell_prime)
        bad = np.nonzero(~finite)[0]
        start = bad[-1] + 1 if len(bad) else 0
        stop = int(np.searchsorted(k, line.k_max)) + 1
        if stop - start < 2:
            raise CoverageError("spectral line has too few usable nodes", field="k_grid")
        self.nodes = k[start:stop]
        self.K = float(self.nodes[-1])
        self.k_first = float(self.nodes[0])
        if k_lo is not None and k_lo < self.k_first:
            if len(bad):
                raise SectorError(f"|r1| >= 1 near k = {k[bad[-1]]:.4g}, below k0 = {k_lo:.4g}", field="zeta")
            raise CoverageError(f"k0 = {k_lo} below the first grid node {self.k_first}", field="zeta")
        self.spline = CubicHermiteSpline(self.nodes, line.log1m[start:stop], line.ell_prime[start:stop])
        self.dspline = self.spline.derivative()
        self.truncation = float(abs(line.log1m[stop - 1]))

    def f(self, s):
        return self.spline(s)

    def df(self, s):
        return self.dspline(s)

    def breakpoints(self, lo: float) -> np.ndarray:
        return self.nodes[self.nodes > lo]


def _check_off_cut(k: complex, k0: float):
    if k.imag == 0 and k.real >= k0:
        raise ValidationError(f"k = {k} lies on the cut [k0, inf)", field="k")


def chi1(zeta: float, k: complex, line: SpectralLine, tol: float = 1e-12) -> complex:
    """(1/2 pi i) int_{k0}^{K} ln0(k - s) f'(s) ds.

    At k = k0 itself the nontangential limit is returned: there
    ln0(k0 - s) = ln|s - k0| + i pi along the cut.
    """
    k = complex(k)
    k0 = zeta / 2
    if k != k0:
        _check_off_cut(k, k0)
    if np.all(line.r1 == 0):
        return 0j
    dens = LogDensity(line, k0)
    if k == k0:
        # the per-panel share of a 1e-12 target falls below rounding on the graded mesh
        log_part = log_singular_quad(dens.df, k0, dens.K, max(tol, 1e-10), breakpoints=dens.breakpoints(k0)).value
        jump_part = 1j * math.pi * float(dens.f(dens.K) - dens.f(k0))
        return (log_part + jump_part) / (2j * math.pi)
    # graded towards k0, where ln0(k - s) is nearly singular for k close to the endpoint
    edges = graded_mesh(k0, dens.K, dens.breakpoints(k0))
    res = panel_quad(lambda s: ln0(k - s) * dens.df(s), edges, tol)
    return complex(res.value) / (2j * math.pi)


def delta1(zeta: float, k: complex, line: SpectralLine, tol: float = 1e-12) -> complex:
    """exp{(1/2 pi i) int_{k0}^{K} f(s) / (s - k) ds}, f = ln(1 - |r1|^2)."""
    k = complex(k)
    k0 = zeta / 2
    _check_off_cut(k, k0)
    if np.all(line.r1 == 0):
        return 1 + 0j
    dens = LogDensity(line, k0)
    K = dens.K
    # subtract f at the real point nearest to k so the integrand stays bounded as k nears the cut
    s_star = min(max(k.real, k0), K)
    f_star = float(dens.f(s_star))
    edges = np.unique(np.concatenate([[k0, s_star], dens.breakpoints(k0)]))
    regular = panel_quad(lambda s: (dens.f(s) - f_star) / (s - k), edges, tol)
    singular = f_star * (cmath.log(K - k) - cmath.log(k0 - k))
    return cmath.exp((complex(regular.value) + singular) / (2j * math.pi))


def density_nu(zeta: float, line: SpectralLine) -> float:
    """nu as seen by the density interpolant, -f(k0) / (2 pi)."""
    k0 = zeta / 2
    return -float(LogDensity(line, k0).f(k0)) / (2 * math.pi)


@dataclass(frozen=True)
class TailResult:
    value: float
    error_estimate: float


def tail_integral(line: SpectralLine, zeta: float, tol: float = DEFAULT_TOL) -> TailResult:
    """(1/pi) int_{k0}^{K} ln|(s - k0)/(s - omega k0)| d ln(1 - |r1(s)|^2)."""
    k0 = zeta / 2
    if np.all(line.r1 == 0):
        return TailResult(0.0, 0.0)
    if not line.k_grid[0] <= k0 <= line.k_max:
        raise CoverageError(f"k0 = {k0} outside [{line.k_grid[0]}, {line.k_max}]", field="zeta")
    dens = LogDensity(line, k0)
    K = dens.K
    if K <= k0:
        return TailResult(0.0, 0.0)
    bps = dens.breakpoints(k0)
    first = log_singular_quad(dens.df, k0, K, tol, breakpoints=bps)
    wk0 = OMEGA * k0
    second = adaptive_quad(
        lambda s: math.log(abs(s - wk0)) * float(dens.df(s)), k0, K, tol, points=list(bps[bps < K])
    )
    value = (float(first.value) - float(second.value)) / math.pi
    # beyond K, |f| <= truncation; integrating by parts bounds the neglected piece
    kernel_K = abs(math.log(abs(K - k0))) + abs(math.log(abs(K - wk0)))
    err = (first.error_estimate + second.error_estimate) / math.pi + dens.truncation * kernel_K / math.pi
    return TailResult(value, err)


@dataclass(frozen=True)
class AsymptoticParams:
    zeta: float
    k0: float
    nu: float
    q: complex
    arg_q: float
    gamma_arg: float
    tail: float
    valid: bool
    zeta0: float = 0.0
    tail_error: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "zeta": self.zeta,
            "k0": self.k0,
            "nu": self.nu,
            "q": [self.q.real, self.q.imag],
            "gamma_arg": self.gamma_arg,
            "tail": self.tail,
            "zeta0": self.zeta0,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "AsymptoticParams":
        q = complex(*d["q"])
        return cls(
            zeta=d["zeta"],
            k0=d["k0"],
            nu=d["nu"],
            q=q,
            arg_q=cmath.phase(q) if q != 0 else 0.0,
            gamma_arg=d["gamma_arg"],
            tail=d["tail"],
            valid=True,
            zeta0=d.get("zeta0", 0.0),
        )


def asym_params(
    line: SpectralLine,
    zeta: float,
    margin: float = DEFAULT_MARGIN,
    epsilon: float = DEFAULT_EPSILON,
    zeta0: float | None = None,
    tol: float = DEFAULT_TOL,
) -> AsymptoticParams:
    zeta = float(zeta)
    if zeta0 is None:
        zeta0 = compute_zeta0(line)
    if not zeta > zeta0 + margin:
        raise SectorError(f"zeta = {zeta} not above zeta0 + margin = {zeta0 + margin}", field="zeta")
    k0 = zeta / 2
    if not line.k_grid[0] <= k0 <= line.k_grid[-1]:
        raise CoverageError(f"k0 = {k0} outside the sampled grid", field="zeta")
    if np.all(line.r1 == 0):
        return AsymptoticParams(zeta, k0, 0.0, 0j, 0.0, 0.0, 0.0, True, zeta0)
    q = line.r1_at(k0)
    nu = nu_of(abs(q) ** 2)
    gamma_arg = gamma_polar(nu)[1] if nu > 0 else 0.0
    tail = tail_integral(line, zeta, tol)
    valid = abs(q) <= 1 - epsilon
    return AsymptoticParams(zeta, k0, nu, q, cmath.phase(q) if q != 0 else 0.0, gamma_arg, tail.value, valid, zeta0, tail.error_estimate)


@dataclass(frozen=True)
class AsymptoticValue:
    u: float
    envelope: float
    phase: float


def u_asym(params: AsymptoticParams, x: float, t: float) -> AsymptoticValue:
    if not t >= T_MIN:
        raise ValidationError(f"t must be >= {T_MIN}, got {t}", field="t")
    if abs(x / t - params.zeta) > 1e-12 * max(1.0, abs(params.zeta)):
        raise ValidationError(f"x/t = {x / t} does not match zeta = {params.zeta}", field="x")
    k0, nu = params.k0, params.nu
    envelope = 3 ** 1.25 * k0 * math.sqrt(nu) / math.sqrt(2 * t)
    phase = (
        19 * math.pi / 12
        + nu * math.log(6 * math.sqrt(3) * t * k0 * k0)
        - math.sqrt(3) * k0 * k0 * t
        - params.arg_q
        - params.gamma_arg
        + params.tail
    )
    return AsymptoticValue(-envelope * math.sin(phase) + 0.0, envelope, phase)


def rays_json(params: list[AsymptoticParams]) -> str:
    return json.dumps([p.to_json_dict() for p in params], indent=2, sort_keys=True)
