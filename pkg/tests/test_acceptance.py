"""Acceptance criteria at their stated tolerances.

Each test prints one ``PASS``/``FAIL`` line (shown even under captured
output) and then asserts. Run directly with ``python tests/test_acceptance.py``
for the summary alone.
"""
from __future__ import annotations

import sys
import time

import numpy as np
import pytest

from epsim import diagnostics as dg
from epsim import experiments as ex
from epsim.config import parse_config
from epsim.fields import SimulationState
from epsim.grid import Grid
from epsim.integrate import rk4_step
from epsim.rhs import (
    flux_eigenvalues,
    flux_jacobian,
    rhs_conservative,
    rhs_convective,
    rhs_zero_alpha,
    stress_symmetric,
)

def report(capsys, number: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}  [{detail}]"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


def corpus(count: int = 20, n: int = 64, seed: int = 2024):
    """Random band-limited d=2 fields paired with alphas in [0, 2]."""
    rng = np.random.default_rng(seed)
    g = Grid(2, n)
    return g, [(g.random_band_limited(rng, 2), float(rng.uniform(0, 2))) for _ in range(count)]


def test_1_form_equivalence(capsys):
    t0 = time.perf_counter()
    g, fields = corpus()
    worst = 0.0
    for u, alpha in fields:
        s = SimulationState(0.0, u, alpha, g)
        a, b = rhs_convective(s), rhs_conservative(s)
        worst = max(worst, g.l2_norm(a - b) / g.l2_norm(a))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 10
    report(capsys, 1, "rhs forms agree", ok, f"max rel L2 diff {worst:.2e} <= 1e-10, {elapsed:.1f}s < 10s")
    assert ok


def test_2_trace_identity(capsys):
    g, fields = corpus()
    n = g.dim
    worst = 0.0
    for u, alpha in fields:
        Ta = stress_symmetric(g, u, alpha)
        trace = sum(Ta[i, i] for i in range(n))
        u2 = np.sum(u**2, axis=0)
        g2 = np.sum(g.gradient(u) ** 2, axis=(0, 1))
        ref = 0.5 * (n + 2) * u2 + 0.5 * alpha * n * g2
        worst = max(worst, float(np.max(np.abs(trace - ref)) / np.max(np.abs(ref))))
    ok = worst <= 1e-12
    report(capsys, 2, "trace identity", ok, f"max |tr Ta - ref| / scale {worst:.2e} <= 1e-12")
    assert ok


CONSERVE = """\
name = acceptance_conservation
dim = 2
points = 128
alpha = {alpha}
t_end = {t_end}
dt = 1e-3
sample_stride = 25
[initial_data]
kind = gaussian_shear
amplitude = 0.5
sigma = 0.5
[integrator]
scheme = rk4
form = {form}
"""


@pytest.mark.slow
def test_3_conservation(capsys):
    t0 = time.perf_counter()
    rep = ex.run_conservation_suite(parse_config(CONSERVE.format(alpha=1.0, t_end=1.0, form="convective")))
    # alpha = 0: energy column is the L2 entropy; t = 0.5 is far from any steepening for this data
    rep0 = ex.run_conservation_suite(parse_config(CONSERVE.format(alpha=0.0, t_end=0.5, form="zero_alpha")))
    elapsed = time.perf_counter() - t0
    ok = (
        rep.passed
        and rep.momentum_drift <= 1e-9
        and rep.energy_drift <= 1e-6
        and rep0.termination.reason.value == "completed"
        and rep0.energy_drift <= 1e-6
        and elapsed < 120
    )
    report(
        capsys, 3, "conservation", ok,
        f"momentum {rep.momentum_drift:.2e} <= 1e-9, energy {rep.energy_drift:.2e} <= 1e-6, "
        f"alpha=0 entropy {rep0.energy_drift:.2e} <= 1e-6, {elapsed:.0f}s < 120s",
    )
    assert ok


BLOWUP = """\
name = acceptance_blowup
dim = 2
points = {n}
alpha = 0
t_end = 2.0
dt = 2e-3
[initial_data]
kind = gradient_cosine
amplitude = 0.5
[integrator]
form = zero_alpha
adaptive = true
[checks]
trip_margin = 0.1
envelope_tol = 1e-3
"""


@pytest.mark.slow
def test_4_blowup_bound(capsys):
    t0 = time.perf_counter()
    fine = ex.run_blowup_study(parse_config(BLOWUP.format(n=256)))
    coarse = ex.run_blowup_study(parse_config(BLOWUP.format(n=128)))
    elapsed = time.perf_counter() - t0
    change = abs(fine.trip_time - coarse.trip_time) / fine.trip_time
    tripped = fine.termination.reason.value in ("blowup_norm", "dt_underflow")
    ok = (
        tripped
        and abs(fine.d0 + 1.0) < 1e-12
        and fine.trip_time <= 1.1
        and fine.envelope_violation <= 0
        and change < 0.05
        and elapsed < 300
    )
    report(
        capsys, 4, "blow-up bound", ok,
        f"trip {fine.trip_time:.4f} <= 1.1 ({fine.termination.reason.value}), "
        f"envelope slack {fine.envelope_violation:.2e} <= 0, N128 vs N256 {change:.2%} < 5%, {elapsed:.0f}s",
    )
    assert ok


SWEEP = """\
name = acceptance_sweep
dim = 2
points = 128
alpha = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]
t_end = 0.3
dt = 2e-3
[initial_data]
kind = gradient_cosine
amplitude = 0.5
[checks]
slope_min = 0.85
slope_max = 1.15
"""


@pytest.mark.slow
def test_5_zero_alpha_rate(capsys):
    t0 = time.perf_counter()
    res = ex.run_alpha_sweep(parse_config(SWEEP))
    elapsed = time.perf_counter() - t0
    ok = not res.aborted and len(res.rows) == 5 and 0.85 <= res.fitted_slope <= 1.15 and elapsed < 600
    errs = ", ".join(f"{r.error_norm_final:.2e}" for r in res.rows)
    report(capsys, 5, "zero-alpha rate", ok, f"slope {res.fitted_slope:.4f} in [0.85, 1.15]; errors {errs}; {elapsed:.0f}s")
    assert ok


def test_6_flux_eigenvalues(capsys):
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(100):
        u = rng.normal(size=3) * rng.uniform(0.1, 10)
        e = rng.normal(size=3)
        e /= np.linalg.norm(e)
        ue, un = u @ e, np.linalg.norm(u)
        oracle = np.sort([ue, 2 * ue + un, 2 * ue - un])
        num = np.sort(np.linalg.eigvals(flux_jacobian(u, e)).real)
        worst = max(worst, float(np.max(np.abs(num - oracle))), float(np.max(np.abs(flux_eigenvalues(u, e) - oracle))))
    # x-direction matrix for a general state (u, v, w), then the named state (1, 0, 0)
    uu, v, w = 0.3, -1.2, 0.7
    general = np.array([[3 * uu, v, w], [v, uu, 0.0], [w, 0.0, uu]])
    same = np.allclose(flux_jacobian([uu, v, w], [1.0, 0.0, 0.0]), general, atol=1e-15)
    named = np.array_equal(flux_jacobian([1.0, 0.0, 0.0], [1.0, 0.0, 0.0]), np.diag([3.0, 1.0, 1.0]))
    ok = worst <= 1e-10 and same and named
    report(capsys, 6, "flux eigenvalues", ok, f"max eigenvalue error {worst:.2e} <= 1e-10; matrix form {same and named}")
    assert ok


PEAKON = """\
name = acceptance_peakon
dim = 1
points = 2048
length = 40.0
alpha = 1.0
t_end = 5.0
dt = 5e-3
sample_stride = 10
[initial_data]
kind = peakon
speed = 1.0
smoothing = 0.01
"""


@pytest.mark.slow
def test_7_traveling_wave(capsys):
    t0 = time.perf_counter()
    rep = ex.run_traveling_wave(parse_config(PEAKON))
    elapsed = time.perf_counter() - t0
    ok = rep.termination.reason.value == "completed" and rep.speed_error <= 0.02 and rep.shape_error <= 0.05 and elapsed < 180
    report(
        capsys, 7, "traveling wave", ok,
        f"speed {rep.speed:.4f} (err {rep.speed_error:.2%} <= 2%), shape err {rep.shape_error:.2%} <= 5%, {elapsed:.0f}s",
    )
    assert ok


def test_8_divergence_identity(capsys):
    rng = np.random.default_rng(8)
    g = Grid(2, 64)
    worst = 0.0
    for _ in range(20):
        u = g.random_band_limited(rng, 2)
        ut = rhs_zero_alpha(g, u)
        res = dg.divergence_evolution_residual(g, u, ut)
        worst = max(worst, float(np.max(np.abs(res)) / np.max(np.abs(g.divergence(ut)))))
    ok = worst <= 1e-8
    report(capsys, 8, "divergence identity", ok, f"max residual / scale {worst:.2e} <= 1e-8")
    assert ok


def test_9_rk4_order(capsys):
    g = Grid(2, 32)
    u0 = g.dealias(0.5 * g.random_band_limited(np.random.default_rng(9), 2, band=3))
    s0 = SimulationState(0.0, u0, 0.5, g)

    def run(dt, t_end=0.5):
        s = s0
        for _ in range(round(t_end / dt)):
            s = rk4_step(s, rhs_convective, dt)
        return s.velocity

    u1, u2, u3 = run(0.05), run(0.025), run(0.0125)
    factor = g.l2_norm(u1 - u2) / g.l2_norm(u2 - u3)
    ok = 14 <= factor <= 18
    report(capsys, 9, "RK4 order", ok, f"self-convergence factor {factor:.3f} in [14, 18]")
    assert ok


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn(None)
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
