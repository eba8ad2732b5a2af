"""Right-hand sides of the Euler-Poincare system.

Two algebraically equivalent momentum tendencies are provided:

* convective:    dm/dt = -(u.grad)m - (grad u)^T m - (div u) m
* conservative:  dm_i/dt = -sum_j d_j (Ta_ij + Tb_ij)

plus the alpha = 0 velocity equation and the pointwise flux Jacobian of that
hyperbolic system. Quadratic products are formed in physical space and, when
``dealias`` is set, projected with the 2/3 rule before any further
differentiation. With band-limited input inside the mask every product is
then the exact product truncated to the mask, so the two forms agree to
round-off.

Index convention: ``G[i, j] = d_j u_i`` (so ``grad u`` has rows indexed by
component).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import SimulationState
from .grid import Grid


class NonFiniteTendency(FloatingPointError):
    """A right-hand side produced NaN or Inf."""


def _finite(out: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(out)):
        raise NonFiniteTendency("non-finite values in right-hand side")
    return out


def _product(grid: Grid, dealias: bool):
    if dealias:
        return lambda a, b: grid.dealias(a * b)
    return lambda a, b: a * b


@dataclass(frozen=True)
class StressTensor:
    symmetric_part: np.ndarray  # Ta_ij, shape (d, d, *grid)
    remainder_inner: np.ndarray  # u_j d_k u_i stored at [i, j, k]
    alpha: float

    def remainder(self, grid: Grid) -> np.ndarray:
        """Tb_ij = -alpha * sum_k d_k (u_j d_k u_i)."""
        return -self.alpha * grid.divergence(self.remainder_inner)


def stress_tensor(grid: Grid, u: np.ndarray, alpha: float, dealias: bool = True) -> StressTensor:
    d = grid.dim
    mul = _product(grid, dealias)
    G = grid.gradient(u)
    Ta = stress_symmetric(grid, u, alpha, dealias)
    inner = np.empty((d, d, d) + grid.shape)
    for i in range(d):
        for j in range(d):
            for k in range(d):
                inner[i, j, k] = mul(u[j], G[i, k])
    return StressTensor(Ta, inner, alpha)


def stress_symmetric(grid: Grid, u: np.ndarray, alpha: float, dealias: bool = False) -> np.ndarray:
    """Ta = u(x)u + a grad u grad u^T - a grad u^T grad u + (|u|^2 + a|grad u|^2)/2 Id, pointwise."""
    d = grid.dim
    mul = _product(grid, dealias)
    G = grid.gradient(u)
    u2 = sum(mul(u[i], u[i]) for i in range(d))
    g2 = sum(mul(G[i, k], G[i, k]) for i in range(d) for k in range(d))
    Ta = np.empty((d, d) + grid.shape)
    for i in range(d):
        for j in range(i, d):
            val = mul(u[i], u[j]) + alpha * sum(
                mul(G[i, k], G[j, k]) - mul(G[k, i], G[k, j]) for k in range(d)
            )
            if i == j:
                val = val + 0.5 * (u2 + alpha * g2)
            Ta[i, j] = Ta[j, i] = val
    return Ta


def rhs_convective(state: SimulationState, dealias: bool = True) -> np.ndarray:
    grid, u, alpha = state.grid, state.velocity, state.alpha
    d = grid.dim
    mul = _product(grid, dealias)
    m = grid.helmholtz_apply(u, alpha)
    G = grid.gradient(u)
    Gm = grid.gradient(m)
    div = sum(G[j, j] for j in range(d))
    out = np.empty_like(u)
    for i in range(d):
        acc = mul(div, m[i])
        for j in range(d):
            acc = acc + mul(u[j], Gm[i, j]) + mul(G[j, i], m[j])
        out[i] = -acc
    return _finite(out)


def rhs_conservative(state: SimulationState, dealias: bool = True) -> np.ndarray:
    grid = state.grid
    T = stress_tensor(grid, state.velocity, state.alpha, dealias)
    total = T.symmetric_part
    if state.alpha:
        total = total + T.remainder(grid)
    return _finite(-grid.divergence(total))


def rhs_zero_alpha(grid: Grid, u: np.ndarray, dealias: bool = True) -> np.ndarray:
    """du/dt = -div(u (x) u) - grad|u|^2 / 2."""
    d = grid.dim
    mul = _product(grid, dealias)
    uu = np.empty((d, d) + grid.shape)
    for i in range(d):
        for j in range(i, d):
            uu[i, j] = uu[j, i] = mul(u[i], u[j])
    u2 = sum(uu[i, i] for i in range(d))
    return _finite(-grid.divergence(uu) - 0.5 * grid.gradient(u2))


def zero_alpha_tendency(state: SimulationState, dealias: bool = True) -> np.ndarray:
    """rhs_zero_alpha wrapped to the state-in, tendency-out signature of the integrator."""
    if state.alpha != 0:
        raise ValueError("the zero-dispersion system requires alpha == 0")
    return rhs_zero_alpha(state.grid, state.velocity, dealias)


RHS_FORMS = {
    "convective": rhs_convective,
    "conservative": rhs_conservative,
    "zero_alpha": zero_alpha_tendency,
}


def flux_jacobian(u_point, e) -> np.ndarray:
    """Flux Jacobian (u.e) Id + e u^T + u e^T of the alpha = 0 system along direction e."""
    u_point = np.asarray(u_point, dtype=float)
    e = np.asarray(e, dtype=float)
    if u_point.ndim != 1 or u_point.shape != e.shape or u_point.size not in (1, 2, 3):
        raise ValueError("u_point and e must be vectors of equal length 1, 2 or 3")
    if abs(np.linalg.norm(e) - 1.0) > 1e-12:
        raise ValueError(f"direction must be a unit vector, |e| = {np.linalg.norm(e)}")
    ue = float(u_point @ e)
    return ue * np.eye(u_point.size) + np.outer(e, u_point) + np.outer(u_point, e)


def flux_eigenvalues(u_point, e) -> np.ndarray:
    """Closed form: u.e (d - 2 times) and 2 u.e +/- |u|, sorted ascending.

    In 1D the single eigenvalue is 3u.
    """
    u_point = np.asarray(u_point, dtype=float)
    e = np.asarray(e, dtype=float)
    ue = float(u_point @ e)
    if u_point.size == 1:
        return np.array([3 * ue])
    un = float(np.linalg.norm(u_point))
    vals = [ue] * (u_point.size - 2) + [2 * ue + un, 2 * ue - un]
    return np.sort(np.array(vals))
