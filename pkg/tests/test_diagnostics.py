import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from epsim import diagnostics as dg
from epsim.fields import SimulationState
from epsim.grid import Grid
from epsim.initial import gradient_cosine
from epsim.rhs import rhs_conservative, rhs_convective, rhs_zero_alpha


def test_energy_and_momentum_of_single_mode():
    g = Grid(1, 32)
    x = g.coords[0]
    alpha = 0.6
    s = SimulationState(0.0, (2.0 + np.sin(x))[None], alpha, g)
    # oracle: int (2 + sin)^2 + alpha cos^2 over [0, 2 pi) = 8 pi + pi + alpha pi
    assert dg.conserved_energy(s) == pytest.approx(math.pi * (9 + alpha), rel=1e-13)
    assert dg.conserved_momentum(s)[0] == pytest.approx(4 * math.pi, rel=1e-13)
    assert dg.entropy_l2(g, s.velocity) == pytest.approx(9 * math.pi, rel=1e-13)


def test_deformation_and_origin_divergence():
    g = Grid(2, 32)
    u = gradient_cosine(g, 0.5)
    S = dg.deformation_tensor(g, u)
    np.testing.assert_allclose(S[0, 1], S[1, 0])
    # u = grad(A cos x cos y) so div u = -2 A cos x cos y, equal to -1 at the origin
    assert dg.divergence_at_origin(g, u) == pytest.approx(-1.0, abs=1e-12)
    assert dg.sup_grad(g, u) == pytest.approx(0.5, abs=1e-12)


def test_besov_proxy_single_shell():
    g = Grid(2, 32)
    x, y = g.coords
    # one scalar mode with |k| = 5 lives entirely in one shell; the proxy is its sup norm
    S = 0.7 * np.cos(3 * x + 4 * y)
    assert dg.besov_proxy(g, S) == pytest.approx(0.7, rel=1e-12)
    # two modes in different shells: the larger sup wins
    S2 = S + 0.2 * np.cos(x)
    assert dg.besov_proxy(g, S2) == pytest.approx(0.7, rel=1e-12)
    assert dg.besov_proxy(g, np.ones_like(x)) == 0.0


def test_riccati_bound():
    assert dg.riccati_bound(-1.0, 0.5) == pytest.approx(-2.0)
    assert dg.riccati_bound(-2.0, 0.0) == -2.0
    with pytest.raises(ValueError):
        dg.riccati_bound(0.5, 0.1)
    with pytest.raises(ValueError):
        dg.riccati_bound(-1.0, 1.0)


def test_error_parts_oracle():
    g = Grid(1, 32)
    x = g.coords[0]
    a, b = np.sin(2 * x)[None], np.zeros((1, 32))
    l2, gr = dg.error_parts(g, a, b, 0.25)
    assert l2 == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert gr == pytest.approx(0.5 * 2 * math.sqrt(math.pi), rel=1e-13)
    assert dg.error_norm(g, a, b, 0.25) == pytest.approx(l2 + gr)
    with pytest.raises(ValueError):
        dg.error_parts(g, a, np.zeros((1, 16)), 0.1)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_divergence_equation_residual_vanishes(seed):
    g = Grid(2, 32)
    u = g.random_band_limited(np.random.default_rng(seed), 2)
    ut = rhs_zero_alpha(g, u)
    res = dg.divergence_evolution_residual(g, u, ut)
    scale = float(np.max(np.abs(g.divergence(ut))))
    assert np.max(np.abs(res)) <= 1e-10 * scale


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=st.floats(0.01, 2.0))
def test_dispersion_truncation_is_the_momentum_defect(seed, alpha):
    # insert an alpha = 0 tendency into the alpha > 0 momentum equation
    g = Grid(2, 32)
    u = g.random_band_limited(np.random.default_rng(seed), 2)
    ut = rhs_zero_alpha(g, u)
    defect = g.helmholtz_apply(ut, alpha) - rhs_convective(SimulationState(0.0, u, alpha, g))
    np.testing.assert_allclose(dg.dispersion_truncation(g, u, ut, alpha), defect, atol=1e-10)


def test_weak_residual_matches_strong_form():
    g = Grid(2, 32)
    rng = np.random.default_rng(5)
    u = g.random_band_limited(rng, 2, band=3)
    phi = g.random_band_limited(rng, 2, band=3)
    alpha = 0.8
    strong = rhs_conservative(SimulationState(0.0, u, alpha, g), dealias=False)
    expected = float(g.integrate(np.sum(strong * phi, axis=0)))
    assert dg.weak_residual_stationary(g, u, alpha, phi) == pytest.approx(expected, rel=1e-10, abs=1e-10)


def test_liouville_functional_is_integrated_trace():
    g = Grid(2, 32)
    u = g.random_band_limited(np.random.default_rng(8), 2, band=5)
    alpha = 0.4
    total = float(g.integrate(dg.trace_of_stress(g, u, alpha)))
    assert dg.liouville_trace_functional(g, u, alpha) == pytest.approx(total, rel=1e-12)


def test_record_and_criterion_integral():
    g = Grid(2, 16)
    u = gradient_cosine(g, 0.5)
    rec = dg.record(SimulationState(0.0, u, 0.0, g))
    assert rec.is_finite()
    assert len(rec.momentum_integral) == 2
    assert rec.energy == pytest.approx(rec.entropy_l2)

    crit = dg.CriterionIntegral()
    for t in (0.0, 0.5, 1.5):
        crit(None, dg.DiagnosticRecord(t, (0.0,), 1.0, 1.0, 1.0, 2.0, -1.0, 1.0))
    assert crit.integral == pytest.approx(3.0)
    assert crit.history == pytest.approx([0.0, 1.0, 3.0])
