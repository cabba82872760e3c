"""Direct scattering: eigenfunctions X, X^A, the spectral functions s, s^A and r1, r2.

X solves X_x = [L(k), X] + U X with X -> I as x -> +inf; it is integrated
downward from x = +X_inf, and s = lim_{x -> -inf} e^{-x ad L} X is accumulated
along the sweep. X^A solves X^A_x = -[L, X^A] - U^T X^A in the same way.

In the default ``columns`` mode only columns 1 and 2 are integrated: for real
k > 0 their kernels never grow, whereas column 3 grows like e^{3k|x|/2}. The
``full`` mode works with the interaction-picture matrix Y = e^{-x ad L} X
(Y_x = e^{-x ad L}(U) Y, Y(+inf) = I, s = Y(-inf)); it is only allowed for
super-exponentially decaying data and bounded |Re(l_i - l_j)| X_inf.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AssumptionError,
    CoverageError,
    InstabilityError,
    SolitonSuspected,
    StiffnessError,
    ValidationError,
)
from .lax import OMEGA, eigenvalues, potential_factors
from .profiles import DEFAULT_EPS, Profile, effective_support

DEFAULT_TOL = 1e-10
K_MIN = 1e-3
DIVISION_THRESHOLD = 1e-12
R1_CUTOFF = 1e-10
FULL_MODE_CAP = 25.0
BLOWUP = 1e12
CHUNK = 64
SCHEMA_LINE = "# schema=1"

# Dormand-Prince 5(4)
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6] + (0.0,)
_E = tuple(
    b - bs
    for b, bs in zip(_B, (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40))
)


# ---------------------------------------------------------------------------
# batched ODE sweep


class _System:
    """Right-hand side of one of the four sweeps for a batch of spectral parameters."""

    def __init__(self, p: Profile, ks: np.ndarray, cols: Sequence[int], mode: str, adjoint: bool):
        self.p = p
        self.ks = ks
        self.cols = [c - 1 for c in cols]
        self.mode = mode
        self.adjoint = adjoint
        nb = len(ks)
        self.l = np.stack([eigenvalues(k) for k in ks])  # (nb, 3)
        c = np.empty((nb, 3), complex)
        rho = np.empty((nb, 3), complex)
        sigma = np.empty((nb, 3), complex)
        for i, k in enumerate(ks):
            c[i], rho[i], sigma[i] = potential_factors(k)
        self.c, self.rho, self.sigma = c, rho, sigma
        # D_ij = l_i - l_j for the integrated columns
        self.diff = self.l[:, :, None] - self.l[:, None, self.cols]
        # l_1 - l_j for the s-accumulators
        self.acc_exp = self.l[:, 0:1] - self.l[:, self.cols]

    def initial(self) -> np.ndarray:
        nb = len(self.ks)
        if self.mode == "full":
            return np.broadcast_to(np.eye(3, dtype=complex), (nb, 3, 3)).copy()
        m = len(self.cols)
        y = np.zeros((nb, 4, m), complex)
        for j, col in enumerate(self.cols):
            y[:, col, j] = 1
            y[:, 3, j] = 1.0 if col == 0 else 0.0
        return y

    def __call__(self, x: float, y: np.ndarray) -> np.ndarray:
        a, b = self.p.lax_coefficients(x)
        beta = a * self.rho + b * self.sigma  # U = c beta^T
        if self.mode == "full":
            ex = np.exp(x * self.l)
            if not self.adjoint:
                # Y' = (e^{-xl} c) ((beta e^{xl}) . Y)
                left, right = self.c / ex, beta * ex
                return left[:, :, None] * np.einsum("bi,bij->bj", right, y)[:, None, :]
            # Y^A' = -(e^{xl} beta) ((c e^{-xl}) . Y^A)
            left, right = beta * ex, self.c / ex
            return -left[:, :, None] * np.einsum("bi,bij->bj", right, y)[:, None, :]
        X = y[:, :3, :]
        out = np.empty_like(y)
        if not self.adjoint:
            proj = np.einsum("bi,bij->bj", beta, X)
            out[:, :3, :] = self.diff * X + self.c[:, :, None] * proj[:, None, :]
            out[:, 3, :] = np.exp(-x * self.acc_exp) * self.c[:, 0:1] * proj
        else:
            proj = np.einsum("bi,bij->bj", self.c, X)
            out[:, :3, :] = -self.diff * X - beta[:, :, None] * proj[:, None, :]
            out[:, 3, :] = -np.exp(x * self.acc_exp) * beta[:, 0:1] * proj
        return out

    def max_growth_exponent(self) -> complex:
        if self.mode == "full":
            d = self.l[:, :, None] - self.l[:, None, :]
        else:
            d = -self.diff if self.adjoint else self.diff
        # a kernel grows on the downward sweep where Re(l_i - l_j) < 0 (sign flipped for X^A)
        idx = np.unravel_index(np.argmin(d.real), d.shape)
        return complex(d[idx])


@dataclass
class SweepResult:
    ks: np.ndarray
    y: np.ndarray  # (nb, 4, m) in columns mode, (nb, 3, 3) in full mode
    x_start: float
    x_end: float
    steps: int
    err: np.ndarray  # accumulated local error estimate per batch member


def _dopri_sweep(system: _System, x_start: float, x_end: float, tol: float) -> SweepResult:
    y = system.initial()
    nb = y.shape[0]
    span = abs(x_end - x_start)
    direction = -1.0 if x_end < x_start else 1.0
    rtol, atol = tol, tol * 1e-2
    h = direction * min(0.05, span / 50)
    x = x_start
    err_acc = np.zeros(nb)
    steps = 0
    k1 = system(x, y)
    while direction * (x_end - x) > 0:
        if direction * (x + h - x_end) > 0:
            h = x_end - x
        stages = [k1]
        for i in range(1, 7):
            yi = y + h * sum(a * s for a, s in zip(_A[i], stages) if a != 0.0)
            stages.append(system(x + _C[i] * h, yi))
        y_new = y + h * sum(b * s for b, s in zip(_B, stages) if b != 0.0)
        err_vec = h * sum(e * s for e, s in zip(_E, stages) if e != 0.0)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        ratio = np.abs(err_vec) / scale
        err_norm = np.sqrt(np.mean(ratio.reshape(nb, -1) ** 2, axis=1))
        worst = float(np.max(err_norm)) if nb else 0.0
        if not math.isfinite(worst):
            raise InstabilityError("non-finite values in eigenfunction sweep", system.max_growth_exponent())
        if worst <= 1.0:
            x = x + h
            y = y_new
            k1 = stages[6]
            steps += 1
            err_acc += np.max(np.abs(err_vec).reshape(nb, -1), axis=1)
            if np.max(np.abs(y)) > BLOWUP:
                raise InstabilityError(
                    f"eigenfunction norm exceeded {BLOWUP:g} at x = {x:.3f}; "
                    f"growing kernel exponent {system.max_growth_exponent():.4g}",
                    system.max_growth_exponent(),
                )
        factor = 0.9 * worst ** (-0.2) if worst > 0 else 5.0
        h *= min(5.0, max(0.2, factor))
        if abs(h) < 1e-12 * span:
            raise StiffnessError(f"step size underflow at x = {x:.6g}")
    return SweepResult(system.ks, y, x_start, x_end, steps, err_acc)


def _check_request(p: Profile, ks: np.ndarray, cols: Sequence[int], mode: str, adjoint: bool, x_inf: float):
    if mode not in ("columns", "full"):
        raise ValidationError(f"unknown mode {mode!r}", field="mode")
    if np.any(ks == 0):
        raise ValidationError("k must be nonzero", field="k")
    if mode == "full":
        if p.decay_class != "super_exponential":
            raise ValidationError("full mode requires super-exponentially decaying data", field="mode")
        for k in ks:
            l = eigenvalues(k)
            spread = np.max(np.abs((l[:, None] - l[None, :]).real)) * x_inf
            if spread > FULL_MODE_CAP:
                raise ValidationError(
                    f"full mode at k={k:.4g}: |Re(l_i - l_j)| X_inf = {spread:.2f} exceeds {FULL_MODE_CAP}",
                    field="mode",
                )
        return
    if not set(cols) <= {1, 2, 3} or not cols:
        raise ValidationError(f"columns must be a nonempty subset of {{1, 2, 3}}, got {cols}", field="cols")
    real_pos = (ks.imag == 0) & (ks.real > 0)
    real_neg = (ks.imag == 0) & (ks.real < 0)
    if 3 in cols and ((not adjoint and np.any(real_pos)) or (adjoint and np.any(real_neg))):
        raise ValidationError("column 3 is unstable on this half-line; use columns {1, 2}", field="cols")


@dataclass
class XSweep:
    """Eigenfunction columns at x = -X_inf together with the accumulated s entries."""

    k: complex
    columns: np.ndarray  # (3, m) columns of X (or X^A) at x_end; full 3x3 in full mode
    s_row: np.ndarray  # accumulated (s)_{1j} for the requested columns, or the full s in full mode
    x_end: float
    est_error: float
    steps: int


def integrate_batch(
    p: Profile,
    ks: Iterable[complex],
    cols: Sequence[int] = (1, 2),
    mode: str = "columns",
    tol: float = DEFAULT_TOL,
    adjoint: bool = False,
    x_inf: float | None = None,
    threads: int = 1,
    chunk: int = CHUNK,
) -> list[XSweep]:
    ks = np.atleast_1d(np.asarray(list(ks), dtype=complex))
    if x_inf is None:
        x_inf = effective_support(p, DEFAULT_EPS)
    _check_request(p, ks, cols, mode, adjoint, x_inf)
    cols = tuple(sorted(cols))
    if p.is_zero:
        return [_identity_sweep(k, cols, mode, x_inf) for k in ks]

    def run(lo: int) -> SweepResult:
        system = _System(p, ks[lo : lo + chunk], cols, mode, adjoint)
        return _dopri_sweep(system, x_inf, -x_inf, tol)

    starts = range(0, len(ks), chunk)
    if threads > 1 and len(ks) > chunk:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(lo) for lo in starts]

    out: list[XSweep] = []
    for res in results:
        for i, k in enumerate(res.ks):
            if mode == "full":
                Y = res.y[i]
                l = eigenvalues(k)
                x = res.x_end
                sgn = 1.0 if not adjoint else -1.0
                X = np.exp(sgn * x * l)[:, None] * Y * np.exp(-sgn * x * l)[None, :]
                out.append(XSweep(complex(k), X, Y.copy(), x, float(res.err[i]), res.steps))
            else:
                out.append(
                    XSweep(complex(k), res.y[i, :3, :].copy(), res.y[i, 3, :].copy(), res.x_end, float(res.err[i]), res.steps)
                )
    return out


def _identity_sweep(k: complex, cols: Sequence[int], mode: str, x_inf: float) -> XSweep:
    if mode == "full":
        return XSweep(complex(k), np.eye(3, dtype=complex), np.eye(3, dtype=complex), -x_inf, 0.0, 0)
    idx = [c - 1 for c in cols]
    row = np.array([1.0 if c == 0 else 0.0 for c in idx], dtype=complex)
    return XSweep(complex(k), np.eye(3, dtype=complex)[:, idx], row, -x_inf, 0.0, 0)


def integrate_X(
    p: Profile,
    k: complex,
    cols: Sequence[int] = (1, 2),
    mode: str = "columns",
    tol: float = DEFAULT_TOL,
    x_inf: float | None = None,
) -> XSweep:
    return integrate_batch(p, [k], cols, mode, tol, adjoint=False, x_inf=x_inf)[0]


def integrate_XA(
    p: Profile,
    k: complex,
    cols: Sequence[int] = (1, 2),
    mode: str = "columns",
    tol: float = DEFAULT_TOL,
    x_inf: float | None = None,
) -> XSweep:
    return integrate_batch(p, [k], cols, mode, tol, adjoint=True, x_inf=x_inf)[0]


# ---------------------------------------------------------------------------
# s, s^A and reflection coefficients


@dataclass
class ScatterSample:
    k: complex
    s11: complex
    s12: complex
    mode: str
    converged: bool = True
    est_error: float = 0.0
    full_s: np.ndarray | None = None


def _in_closed_d1(k: complex) -> bool:
    theta = math.atan2(k.imag, k.real)
    return -1e-12 <= theta <= math.pi / 3 + 1e-12


def _sample_from(sweep: XSweep, mode: str, cols: Sequence[int]) -> ScatterSample:
    if mode == "full":
        s = sweep.s_row
        return ScatterSample(sweep.k, complex(s[0, 0]), complex(s[0, 1]), mode, True, sweep.est_error, s)
    vals = dict(zip(cols, sweep.s_row))
    return ScatterSample(sweep.k, complex(vals[1]), complex(vals.get(2, np.nan)), mode, True, sweep.est_error)


def s_entries_batch(
    p: Profile,
    ks: Iterable[complex],
    mode: str = "columns",
    tol: float = DEFAULT_TOL,
    k_min: float = K_MIN,
    threads: int = 1,
    adjoint: bool = False,
) -> list[ScatterSample]:
    ks = [complex(k) for k in ks]
    for k in ks:
        if abs(k) < k_min:
            raise ValidationError(f"|k| = {abs(k):.3g} is closer to the origin than k_min = {k_min:g}", field="k")
    if mode == "full":
        cols: tuple[int, ...] = (1, 2, 3)
    elif all(k.imag == 0 for k in ks):
        cols = (1, 2)
    else:
        cols = (1,)
    sweeps = integrate_batch(p, ks, cols if mode == "columns" else (1, 2, 3), mode, tol, adjoint=adjoint, threads=threads)
    return [_sample_from(sw, mode, cols) for sw in sweeps]


def s_entries(p: Profile, k: complex, mode: str = "columns", tol: float = DEFAULT_TOL, k_min: float = K_MIN) -> ScatterSample:
    """s11 and s12 (full s in full mode) for real k > 0 or k in the closed sector D1."""
    k = complex(k)
    if not (k.imag == 0 or _in_closed_d1(k)) and mode == "columns":
        raise ValidationError(f"k = {k} is outside the closed sector D1", field="k")
    return s_entries_batch(p, [k], mode, tol, k_min)[0]


def sA_entries(p: Profile, k: complex, mode: str = "columns", tol: float = DEFAULT_TOL, k_min: float = K_MIN) -> ScatterSample:
    """s^A_11 and s^A_12 (stored as s11/s12) for real k < 0 or k in the closed sector D4."""
    k = complex(k)
    if not (k.imag == 0 or _in_closed_d1(-k)) and mode == "columns":
        raise ValidationError(f"k = {k} is outside the closed sector D4", field="k")
    return s_entries_batch(p, [k], mode, tol, k_min, adjoint=True)[0]


def _quotient(sample: ScatterSample) -> tuple[complex, float]:
    if abs(sample.s11) < DIVISION_THRESHOLD:
        raise SolitonSuspected(sample.k, sample.s11)
    r = sample.s12 / sample.s11
    err = (sample.est_error + abs(r) * sample.est_error) / abs(sample.s11)
    return r, err


def reflection(p: Profile, k: float, which: str = "r1", tol: float = DEFAULT_TOL, k_min: float = K_MIN) -> complex:
    """r1(k) = s12/s11 for k > 0, r2(k) = s^A_12/s^A_11 for k < 0."""
    k = float(k)
    if which == "r1":
        if not k > 0:
            raise ValidationError("r1 is defined for k > 0", field="k")
        return _quotient(s_entries(p, k, tol=tol, k_min=k_min))[0]
    if which == "r2":
        if not k < 0:
            raise ValidationError("r2 is defined for k < 0", field="k")
        return _quotient(sA_entries(p, k, tol=tol, k_min=k_min))[0]
    raise ValidationError(f"which must be 'r1' or 'r2', got {which!r}", field="which")


def richardson_origin(values: Sequence[complex]) -> tuple[complex, complex]:
    """Extrapolate samples at h, 2h, 4h (in that order) to h -> 0.

    Returns the second-order extrapolate and the first-order one built from
    the coarse pair, whose gap serves as a consistency measure.
    """
    f1, f2, f4 = values
    fine = (8 * f1 - 6 * f2 + f4) / 3
    coarse = 2 * f2 - f4
    return fine, coarse


def origin_ladder(k_min: float = K_MIN) -> np.ndarray:
    return k_min * np.array([1.0, 2.0, 4.0])


def r1_at_origin(p: Profile, k_min: float = K_MIN, tol: float = DEFAULT_TOL) -> complex:
    samples = s_entries_batch(p, origin_ladder(k_min), tol=tol, k_min=k_min)
    return richardson_origin([_quotient(s)[0] for s in samples])[0]


def r2_at_origin(p: Profile, k_min: float = K_MIN, tol: float = DEFAULT_TOL) -> complex:
    samples = s_entries_batch(p, -origin_ladder(k_min), tol=tol, k_min=k_min, adjoint=True)
    return richardson_origin([_quotient(s)[0] for s in samples])[0]


# ---------------------------------------------------------------------------
# spectral line


def fd_weights(nodes: np.ndarray, at: float) -> np.ndarray:
    """First-derivative weights on arbitrary nodes (exact for polynomials of degree < len(nodes))."""
    n = len(nodes)
    d = nodes - at
    V = np.vander(d, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[1] = 1.0
    return np.linalg.solve(V, rhs)


def fd_derivative(k: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Five-point derivative: centred in the interior, one-sided at the two ends."""
    n = len(k)
    if n < 5:
        raise ValidationError("need at least five grid nodes", field="k_grid")
    out = np.empty(n, dtype=np.result_type(f, float))
    for i in range(n):
        lo = min(max(i - 2, 0), n - 5)
        idx = slice(lo, lo + 5)
        out[i] = fd_weights(k[idx], k[i]) @ f[idx]
    return out


def local_cubic(k_grid: np.ndarray, values: np.ndarray, at: float):
    """Cubic Lagrange interpolation on the four nodes nearest to ``at``."""
    n = len(k_grid)
    i = int(np.searchsorted(k_grid, at))
    lo = min(max(i - 2, 0), n - 4)
    nodes = k_grid[lo : lo + 4]
    vals = values[lo : lo + 4]
    out = 0.0
    for j in range(4):
        w = 1.0
        for m in range(4):
            if m != j:
                w *= (at - nodes[m]) / (nodes[j] - nodes[m])
        out = out + w * vals[j]
    return out


@dataclass
class SpectralLine:
    k_grid: np.ndarray
    r1: np.ndarray
    est_error: np.ndarray = field(default=None)  # type: ignore[assignment]
    cutoff: float = R1_CUTOFF

    def __post_init__(self):
        self.k_grid = np.asarray(self.k_grid, dtype=float)
        self.r1 = np.asarray(self.r1, dtype=complex)
        if self.est_error is None:
            self.est_error = np.zeros(len(self.k_grid))
        self.est_error = np.asarray(self.est_error, dtype=float)
        if len(self.k_grid) != len(self.r1):
            raise ValidationError("k_grid and r1 differ in length", field="k_grid")
        if len(self.k_grid) < 5 or np.any(np.diff(self.k_grid) <= 0) or self.k_grid[0] <= 0:
            raise ValidationError("k_grid must be strictly increasing, positive, with >= 5 nodes", field="k_grid")
        self.abs2 = np.abs(self.r1) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            self.log1m = np.where(self.abs2 < 1, np.log1p(-np.minimum(self.abs2, 1.0)), np.nan)
        self.ell_prime = fd_derivative(self.k_grid, self.log1m)

    @property
    def k_max(self) -> float:
        """First node beyond which |r1| stays below the cutoff."""
        above = np.nonzero(np.abs(self.r1) >= self.cutoff)[0]
        if len(above) == 0:
            return float(self.k_grid[0])
        i = min(above[-1] + 1, len(self.k_grid) - 1)
        return float(self.k_grid[i])

    @property
    def truncated(self) -> bool:
        return bool(abs(self.r1[-1]) >= self.cutoff)

    def r1_at(self, k: float) -> complex:
        if not self.k_grid[0] <= k <= self.k_grid[-1]:
            raise CoverageError(f"k = {k} outside [{self.k_grid[0]}, {self.k_grid[-1]}]", field="k")
        return complex(local_cubic(self.k_grid, self.r1, k))

    def origin_distance(self) -> float:
        """|r1 extrapolated to k = 0 - omega| from the three smallest nodes (quadratic fit)."""
        k, r = self.k_grid[:3], self.r1[:3]
        coeffs = np.polyfit(k, r, 2)
        return float(abs(np.polyval(coeffs, 0.0) - OMEGA))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(SCHEMA_LINE + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "re_r1", "im_r1", "abs_r1", "ell_prime", "est_error"])
        for k, r, lp, e in zip(self.k_grid, self.r1, self.ell_prime, self.est_error):
            w.writerow([repr(float(v)) for v in (k, r.real, r.imag, abs(r), lp, e)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SpectralLine":
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        rows = list(csv.DictReader(lines))
        k = np.array([float(r["k"]) for r in rows])
        r1 = np.array([complex(float(r["re_r1"]), float(r["im_r1"])) for r in rows])
        err = np.array([float(r["est_error"]) for r in rows])
        return cls(k, r1, err)


def default_k_grid(k_lo: float = 0.01, k_hi: float = 8.0, dk: float = 0.01) -> np.ndarray:
    n = int(round((k_hi - k_lo) / dk))
    return k_lo + dk * np.arange(n + 1)


def spectral_line(
    p: Profile,
    k_grid: Sequence[float],
    tol: float = DEFAULT_TOL,
    k_min: float = K_MIN,
    threads: int = 1,
) -> SpectralLine:
    k_grid = np.asarray(k_grid, dtype=float)
    if np.any(np.diff(k_grid) <= 0):
        raise ValidationError("k_grid must be strictly increasing", field="k_grid")
    if k_grid[0] < k_min:
        raise ValidationError(f"k_grid starts below k_min = {k_min:g}", field="k_grid")
    samples = s_entries_batch(p, k_grid, tol=tol, k_min=k_min, threads=threads)
    r1 = np.empty(len(k_grid), complex)
    err = np.empty(len(k_grid))
    for i, s in enumerate(samples):
        try:
            r1[i], err[i] = _quotient(s)
        except AssumptionError as exc:
            raise type(exc)(s.k, s.s11) from exc
    return SpectralLine(k_grid, r1, err)


def compute_zeta0(line: SpectralLine, xtol: float = 1e-8) -> float:
    """Twice the largest k >= 0 with |r1(k)| = 1 (0 if |r1| < 1 on the whole grid)."""
    mod = np.abs(line.r1)
    if mod[-1] >= 1:
        raise CoverageError("|r1| >= 1 at the end of the grid; extend k_max", field="k_grid")
    above = np.nonzero(mod >= 1)[0]
    if len(above) == 0:
        return 0.0
    i = above[-1]
    lo, hi = line.k_grid[i], line.k_grid[i + 1]
    g = lambda k: abs(local_cubic(line.k_grid, line.r1, k)) - 1.0
    if g(lo) < 0:
        # interpolant dips below one at the node itself; the crossing is at the node
        return 2.0 * float(lo)
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if g(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return 2.0 * 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# assumption checks


@dataclass
class AssumptionConfig:
    k_min: float = K_MIN
    k_sector_max: float = 4.0
    n_radii: int = 40
    n_spokes: int = 7
    origin_threshold: float = 1e-6
    ladder_consistency: float = 0.05
    soliton_threshold: float = DIVISION_THRESHOLD
    winding: bool = True
    tol: float = 1e-9


@dataclass
class AssumptionReport:
    min_abs_s11_D1: float
    min_abs_sA11_D4: float
    origin_limit_s: complex
    origin_limit_sA: complex
    winding_s11: int | None
    winding_sA11: int | None
    origin_consistency: tuple[float, float]
    verdict: dict[str, str]
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "min_abs_s11_D1": self.min_abs_s11_D1,
            "min_abs_sA11_D4": self.min_abs_sA11_D4,
            "origin_limit_s": [self.origin_limit_s.real, self.origin_limit_s.imag],
            "origin_limit_sA": [self.origin_limit_sA.real, self.origin_limit_sA.imag],
            "winding_s11": self.winding_s11,
            "winding_sA11": self.winding_sA11,
            "origin_consistency": list(self.origin_consistency),
            "verdict": dict(self.verdict),
            "diagnostics": list(self.diagnostics),
        }


def sector_mesh(cfg: AssumptionConfig) -> np.ndarray:
    radii = np.geomspace(cfg.k_min, cfg.k_sector_max, cfg.n_radii)
    angles = np.linspace(0.0, math.pi / 3, cfg.n_spokes)
    return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()


def sector_boundary(r_in: float, r_out: float, n: int = 60) -> np.ndarray:
    """Closed counter-clockwise boundary of {r_in <= |k| <= r_out, 0 <= arg k <= pi/3}."""
    radial = np.geomspace(r_in, r_out, n)
    arc = np.linspace(0.0, math.pi / 3, n // 2)
    e = np.exp(1j * math.pi / 3)
    return np.concatenate(
        [
            radial[:-1],
            (r_out * np.exp(1j * arc))[:-1],
            (radial[::-1] * e)[:-1],
            (r_in * np.exp(1j * arc[::-1]))[:-1],
            [r_in],
        ]
    )


def winding_number(func, boundary: np.ndarray, max_rounds: int = 8, max_jump: float = math.pi / 4) -> int:
    """Winding number of func along a closed polygon, refining where the phase jumps."""
    pts = np.asarray(boundary, dtype=complex)
    vals = np.asarray(func(pts), dtype=complex)
    for _ in range(max_rounds):
        jumps = np.abs(np.angle(vals[1:] / vals[:-1]))
        bad = np.nonzero(jumps > max_jump)[0]
        if len(bad) == 0:
            break
        mids = 0.5 * (pts[bad] + pts[bad + 1])
        mid_vals = np.asarray(func(mids), dtype=complex)
        pts = np.insert(pts, bad + 1, mids)
        vals = np.insert(vals, bad + 1, mid_vals)
    total = np.sum(np.angle(vals[1:] / vals[:-1]))
    return int(round(total / (2 * math.pi)))


def assumption_checks(p: Profile, cfg: AssumptionConfig | None = None, threads: int = 1) -> AssumptionReport:
    cfg = cfg or AssumptionConfig()
    diagnostics: list[str] = []
    verdict = {"solitonless": "pass", "origin": "pass"}

    def s11_at(ks, adjoint=False):
        ks = np.asarray(ks, dtype=complex)
        samples = s_entries_batch(p, ks, tol=cfg.tol, k_min=cfg.k_min * (1 - 1e-12), threads=threads, adjoint=adjoint)
        return np.array([s.s11 for s in samples])

    mesh = sector_mesh(cfg)
    min_s = min_sA = float("nan")
    wind_s = wind_sA = None
    try:
        min_s = float(np.min(np.abs(s11_at(mesh))))
        min_sA = float(np.min(np.abs(s11_at(-mesh, adjoint=True))))
        if cfg.winding:
            bnd = sector_boundary(cfg.k_min, cfg.k_sector_max)
            wind_s = winding_number(lambda ks: s11_at(ks), bnd)
            wind_sA = winding_number(lambda ks: s11_at(ks, adjoint=True), -bnd)
    except (InstabilityError, StiffnessError) as exc:
        verdict["solitonless"] = "inconclusive"
        diagnostics.append(f"sector sweep unstable: {exc}")
    else:
        if min(min_s, min_sA) < cfg.soliton_threshold:
            verdict["solitonless"] = "fail"
            diagnostics.append("near-zero s11 or sA11 on the sector mesh")
        if wind_s or wind_sA:
            verdict["solitonless"] = "fail"
            diagnostics.append(f"argument principle: {wind_s} zero(s) of s11 in D1, {wind_sA} of sA11 in D4")

    ladder = origin_ladder(cfg.k_min)
    f = [k * k * s for k, s in zip(ladder, s11_at(ladder))]
    fA = [k * k * s for k, s in zip(-ladder, s11_at(-ladder, adjoint=True))]
    lim_s, coarse_s = richardson_origin(f)
    lim_sA, coarse_sA = richardson_origin(fA)

    def rel_gap(a, b):
        return abs(a - b) / abs(a) if abs(a) > 0 else math.inf

    consistency = (float(rel_gap(lim_s, coarse_s)), float(rel_gap(lim_sA, coarse_sA)))
    if min(abs(lim_s), abs(lim_sA)) <= cfg.origin_threshold:
        verdict["origin"] = "fail"
        diagnostics.append("k^2 s11 (or k^2 sA11) tends to zero at the origin")
    elif max(consistency) > cfg.ladder_consistency:
        verdict["origin"] = "inconclusive"
        diagnostics.append(f"origin ladder inconsistent: {consistency}")
    return AssumptionReport(min_s, min_sA, complex(lim_s), complex(lim_sA), wind_s, wind_sA, consistency, verdict, diagnostics)
