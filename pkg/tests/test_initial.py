import numpy as np
import pytest

from epsim import initial
from epsim.fields import reflection_defect
from epsim.grid import Grid


def test_gradient_cosine_is_odd_with_known_divergence():
    g = Grid(2, 32, length=4.0)
    u = initial.gradient_cosine(g, 0.5)
    assert reflection_defect(g, u) < 1e-14
    d0 = g.divergence(u)[g.origin_index]
    assert d0 == pytest.approx(initial.gradient_cosine_divergence(g, 0.5), rel=1e-12)
    assert d0 == pytest.approx(-2 * 0.5 * 2 * np.pi / 4.0, rel=1e-12)


def test_odd_random_scaled_and_symmetric():
    g = Grid(2, 32)
    u = initial.odd_random(g, 0.8, seed=11, band=4)
    assert np.max(np.abs(u)) == pytest.approx(0.8)
    assert reflection_defect(g, u) < 1e-14
    np.testing.assert_array_equal(u, initial.odd_random(g, 0.8, seed=11, band=4))


def test_peakon_profile():
    g = Grid(1, 1024, length=40.0)
    u = initial.peakon(g, 1.5, 4.0, 0.01)
    x = g.coords[0]
    far = (np.abs(x) > 2) & (np.abs(x) < 10)  # clear of the crest and of the kink at the wrap
    # away from the crest a Gaussian of width eps only rescales exp(-|x|/a) by exp(eps^2 / 2a^2)
    oracle = 1.5 * np.exp(-np.abs(x[far]) / 2.0) * np.exp(0.01**2 / (2 * 2.0**2))
    np.testing.assert_allclose(u[0][far], oracle, rtol=2e-6)
    assert u[0].max() == pytest.approx(1.5, rel=0.01)
    with pytest.raises(ValueError):
        initial.peakon(Grid(2, 16), 1.0, 1.0, 0.01)
    with pytest.raises(ValueError):
        initial.peakon(g, 1.0, 0.0, 0.01)


def test_gaussian_shear_and_build():
    g = Grid(2, 32)
    u = initial.gaussian_shear(g, 0.5, 0.5)
    x, y = g.coords
    np.testing.assert_allclose(u[0], 0.5 * np.exp(-2 * y**2))
    np.testing.assert_allclose(u[1], 0.25 * np.exp(-2 * x**2))
    built = initial.build(g, initial.InitialData(), alpha=1.0)
    np.testing.assert_allclose(built, g.dealias(u))
    with pytest.raises(ValueError):
        initial.build(g, initial.InitialData(kind="vortex"), 1.0)


def test_validate_lists_problems():
    errs = initial.InitialData(kind="nope", sigma=0.0, band=0).validate()
    assert len(errs) == 3
    assert initial.InitialData().validate() == []
