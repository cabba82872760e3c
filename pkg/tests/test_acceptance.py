"""Acceptance criteria 1-11 at their stated tolerances.

Each test records a PASS/FAIL line (collected into the terminal summary) before
asserting, so a failing criterion still reports its measured numbers.
"""

from __future__ import annotations

import cmath
import math
import time

import mpmath
import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES
from oracles import picard_s
from test_lax import symmetry_defects

from boussinesq_ist import asymptotics as A
from boussinesq_ist import harness, pderef, scatter
from boussinesq_ist.errors import BoussinesqError
from boussinesq_ist.lax import OMEGA
from boussinesq_ist.model import cross_coefficients
from boussinesq_ist.numkit import gamma_polar, log_gamma
from boussinesq_ist.profiles import gaussian_profile


def verdict(n, ok: bool, detail: str):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_zero_data(zero_profile):
    t0 = time.perf_counter()
    worst = 0.0
    for k in (0.3, 1.0, 2.5):
        s = scatter.s_entries(zero_profile, k, mode="full").full_s
        sA = scatter.sA_entries(zero_profile, -k, mode="full").full_s
        worst = max(worst, np.max(np.abs(s - np.eye(3))), np.max(np.abs(sA - np.eye(3))))
        worst = max(worst, abs(scatter.reflection(zero_profile, k)), abs(scatter.reflection(zero_profile, -k, "r2")))
    line = scatter.spectral_line(zero_profile, scatter.default_k_grid(0.01, 2.0, 0.05))
    for k in (0.3 + 0.2j, -1.0 + 0j, 0.1 - 0.4j):
        worst = max(worst, abs(A.delta1(1.0, k, line) - 1))
    run = pderef.pde_run(zero_profile, pderef.SolverConfig(L=50.0, N=256, t_end=1.0))
    worst = max(worst, float(np.max(np.abs(run.fields[-1].u))), float(np.max(np.abs(run.fields[-1].v))))
    elapsed = time.perf_counter() - t0
    verdict(1, worst <= 1e-12 and elapsed < 1.0, f"max defect {worst:.1e}, {elapsed:.2f} s")


def test_criterion_02_unit_determinant():
    t0 = time.perf_counter()
    worst = 0.0
    for amp in (0.05, 0.2):
        p = gaussian_profile(amp)
        for k in (0.25, 0.5, 1.0, 2.0):
            s = scatter.s_entries(p, k, mode="full").full_s
            worst = max(worst, abs(np.linalg.det(s) - 1))
    elapsed = time.perf_counter() - t0
    verdict(2, worst <= 1e-6 and elapsed < 30, f"max |det s - 1| = {worst:.1e}, {elapsed:.1f} s")


@pytest.mark.parametrize("amp", [0.1, -0.1, 0.05])
def test_criterion_03_origin(amp):
    p = gaussian_profile(amp)
    d1 = abs(scatter.r1_at_origin(p) - OMEGA)
    d2 = abs(scatter.r2_at_origin(p) - 1)
    ladder = scatter.origin_ladder()
    vals = [k * k * s.s11 for k, s in zip(ladder, scatter.s_entries_batch(p, ladder))]
    fine, coarse = scatter.richardson_origin(vals)
    gap = abs(fine - coarse) / abs(fine)
    ok = d1 <= 1e-3 and d2 <= 1e-3 and abs(fine) > 1e-6 and gap <= 0.05
    verdict(3, ok, f"amp {amp}: |r1(0)-w| = {d1:.1e}, |r2(0)-1| = {d2:.1e}, |k^2 s11| = {abs(fine):.2e}, ladder gap {gap:.1%}")


def test_criterion_04_gamma():
    mpmath.mp.dps = 30
    worst_mod = worst_arg = 0.0
    conj_exact = True
    for nu in np.geomspace(1e-3, 10, 60):
        nu = float(nu)
        mod, arg = gamma_polar(nu)
        closed = math.sqrt(2 * math.pi) / math.sqrt(nu * (math.exp(math.pi * nu) - math.exp(-math.pi * nu)))
        oracle = mpmath.gamma(1j * nu)
        worst_mod = max(worst_mod, abs(mod - closed) / closed, abs(mod - float(abs(oracle))) / closed)
        worst_arg = max(worst_arg, abs(math.remainder(arg - float(mpmath.arg(oracle)), 2 * math.pi)))
        conj_exact &= log_gamma(-1j * nu) == log_gamma(1j * nu).conjugate()
    ok = worst_mod <= 1e-10 and worst_arg <= 1e-10 and conj_exact
    verdict(4, ok, f"modulus rel {worst_mod:.1e}, arg {worst_arg:.1e}, conjugation exact: {conj_exact}")


def test_criterion_05_model_identity():
    mpmath.mp.dps = 30
    worst = worst_oracle = 0.0
    for r in (0.1, 0.5, 0.9):
        for ang in (0.0, 0.7, -2.0):
            q = cmath.rect(r, ang)
            # oracle first: the printed formulas with mpmath gamma
            qq = mpmath.mpc(q.real, q.imag)
            nu = -mpmath.log(1 - abs(qq) ** 2) / (2 * mpmath.pi)
            b12 = mpmath.sqrt(2 * mpmath.pi) * mpmath.exp(-1j * mpmath.pi / 4 - 5 * mpmath.pi * nu / 2)
            b12 /= mpmath.conj(qq) * mpmath.gamma(-1j * nu)
            b21 = mpmath.sqrt(2 * mpmath.pi) * mpmath.exp(1j * mpmath.pi / 4 + 3 * mpmath.pi * nu / 2)
            b21 /= qq * mpmath.gamma(1j * nu)
            worst_oracle = max(worst_oracle, float(abs(b12 * b21 - nu)))
            c = cross_coefficients(q)
            worst = max(worst, abs(c.beta12 * c.beta21 - c.nu_q))
    verdict(5, worst <= 1e-10 and worst_oracle <= 1e-20, f"|b12 b21 - nu| = {worst:.1e} (oracle {worst_oracle:.1e})")


def test_criterion_06_jump_symmetry():
    a, b = symmetry_defects(np.random.default_rng(2024), 1000)
    verdict(6, a <= 1e-10 and b <= 1e-10, f"rotation {a:.1e}, conjugation {b:.1e} over 1000 triples")


def test_criterion_07_adjoint_identity(gauss01):
    oracle_gap = 0.0
    for k in (0.5, -0.7):
        s, sA = picard_s(gauss01.u0.value, gauss01.u0.derivative, gauss01.v0.value, k), picard_s(
            gauss01.u0.value, gauss01.u0.derivative, gauss01.v0.value, k, adjoint=True
        )
        oracle_gap = max(oracle_gap, float(np.linalg.norm(sA.T @ s - np.eye(3))))
    assert oracle_gap < 1e-10, "oracle does not confirm the adjoint identity"
    worst = 0.0
    for p in (gauss01, gaussian_profile(0.2, 1.5, 0.3)):
        for k in (0.25, 0.5, 1.0, -0.5, -1.5):
            s = scatter.s_entries(p, k, mode="full").full_s
            sA = scatter.sA_entries(p, k, mode="full").full_s
            worst = max(worst, float(np.linalg.norm(sA.T @ s - np.eye(3))))
    verdict(7, worst <= 1e-6, f"max ||(sA)^T s - I|| = {worst:.1e} (oracle {oracle_gap:.1e})")


def _boundary_jump(zeta, s0, line, eps=(4e-3, 2e-3, 1e-3)):
    logs = [cmath.log(A.delta1(zeta, s0 + 1j * e, line) / A.delta1(zeta, s0 - 1j * e, line)) for e in eps]
    return cmath.exp(scatter.richardson_origin(logs[::-1])[0])


def test_criterion_08_delta1(line01):
    zeta = 1.0
    jump = 0.0
    for idx in (60, 75, 100, 150, 250):
        s0 = line01.k_grid[idx]
        jump = max(jump, abs(_boundary_jump(zeta, s0, line01) - (1 - line01.abs2[idx])))
    nu = A.density_nu(zeta, line01)
    cons = 0.0
    for k in (0.3 + 0.2j, 0.7 - 0.1j, -1.0 + 0j, 2.0 + 1e-3j, 0.5j):
        expected = np.exp(-1j * nu * A.ln0(k - zeta / 2)) * cmath.exp(-A.chi1(zeta, k, line01))
        cons = max(cons, abs(A.delta1(zeta, k, line01) - expected))
    verdict(8, jump <= 1e-6 and cons <= 1e-8, f"jump defect {jump:.1e}, representation defect {cons:.1e}")


def _physics(profile_spec, tmp_path):
    cfg = harness.load_config(None)
    cfg["profile"] = profile_spec
    store = harness.Store(tmp_path)
    t0 = time.perf_counter()
    try:
        _, fits = harness.run_compare(cfg, store)
    except BoussinesqError as exc:
        return None, f"{type(exc).__name__}: {exc} after {time.perf_counter() - t0:.0f} s"
    elapsed = time.perf_counter() - t0
    parts = []
    ok = True
    for f in fits:
        slope = f["slope"]
        good = f["rel_error_at_t_max"] <= 0.15 and slope is not None and slope <= -0.9
        ok &= good
        parts.append(f"zeta {f['zeta']:g}: rel {f['rel_error_at_t_max']:.3f}, slope {slope if slope is None else round(slope, 3)}")
    return ok, "; ".join(parts) + f" ({elapsed:.0f} s)"


def test_criterion_09_physics(tmp_path):
    ok, detail = _physics({"u0": [{"family": "gaussian", "amplitude": 0.1}]}, tmp_path)
    verdict(9, bool(ok), "gaussian(0.1): " + detail)


def test_criterion_09_supplementary_mirror_datum(tmp_path):
    # amplitude -0.1 satisfies the solitonless check; same rays, times and thresholds
    ok, detail = _physics({"u0": [{"family": "gaussian", "amplitude": -0.1}]}, tmp_path)
    verdict("9 (supplementary, gaussian(-0.1))", bool(ok), detail)


def test_criterion_10_reflection_curve(gauss01, tmp_path):
    t0 = time.perf_counter()
    line = scatter.spectral_line(gauss01, scatter.default_k_grid())
    (tmp_path / "spectral_line.csv").write_text(line.to_csv())
    elapsed = time.perf_counter() - t0
    mod = np.abs(line.r1)
    at_origin = abs(abs(scatter.r1_at_origin(gauss01)) - 1)
    decay = float(mod[line.k_grid >= 4].max())
    zeta0 = scatter.compute_zeta0(line)
    ok = at_origin <= 1e-3 and mod.max() < 1 and decay < 1e-6 and zeta0 == 0 and elapsed < 60
    verdict(
        10,
        ok,
        f"||r1(0+)| - 1| = {at_origin:.1e}, max|r1| = {mod.max():.4f}, max|r1| on k>=4 = {decay:.1e}, "
        f"zeta0 = {zeta0}, CSV in {elapsed:.1f} s",
    )


def test_criterion_11_pde_gates():
    p = gaussian_profile(0.1)
    # the sizing rule asks for L ~ 613 here; wrap-around cannot change the zero mode, so it is allowed
    run = pderef.pde_run(p, pderef.SolverConfig(L=400.0, N=2**13, t_end=100.0, sample_times=[50.0], allow_wrap=True))
    m0 = run.conserved[0]["int_u"]
    drift = max(abs(c["int_u"] - m0) for c in run.conserved) / abs(m0)
    drift_v = max(abs(c["int_v"]) for c in run.conserved)

    L, N, j = 20.0, 64, 5
    x = pderef.grid(L, N)
    xi = math.pi * j / L
    state = pderef.WaveField(L, N, 0.0, 1e-8 * np.cos(xi * x), np.zeros(N))
    U0 = np.fft.rfft(state.u)[j]
    dt = pderef.SolverConfig(L=L, N=N, t_end=1.0).dt_max
    for _ in range(40):
        state = pderef.pde_step(state, dt)
    omega = xi**2 / math.sqrt(3)
    U, V = np.fft.rfft(state.u)[j], np.fft.rfft(state.v)[j]
    est = math.atan2((V * 3 * omega / (1j * xi**3) / U0).real, (U / U0).real) / (40 * dt)
    freq = abs(est - omega) / omega

    coarse_cfg = pderef.SolverConfig(L=100.0, N=1024, t_end=100.0, allow_wrap=True)
    fine_cfg = pderef.SolverConfig(L=100.0, N=2048, t_end=100.0, dt=coarse_cfg.dt / 4, allow_wrap=True)
    coarse_cfg = pderef.SolverConfig(L=100.0, N=1024, t_end=100.0, dt=coarse_cfg.dt / 4, allow_wrap=True)
    uc = pderef.pde_run(p, coarse_cfg).fields[-1].u
    uf = pderef.pde_run(p, fine_cfg).fields[-1].u
    selfconv = float(np.max(np.abs(uf[::2] - uc)))

    ok = drift <= 1e-9 and drift_v <= 1e-9 * abs(m0) and freq <= 1e-6 and selfconv <= 1e-6
    verdict(11, ok, f"mass drift {drift:.1e} (v: {drift_v:.1e}), frequency rel {freq:.1e}, N-doubling {selfconv:.1e}")
