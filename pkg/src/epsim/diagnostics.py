"""Measured quantities: conserved integrals, deformation and criterion monitors,
Riccati envelope at the reflection point, zero-alpha error functional,
truncation and weak-form residuals, and the Liouville trace functional.

Integrals use the torus quadrature ``mean * volume``, which is exact for
band-limited integrands.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .fields import SimulationState
from .grid import Grid
from .rhs import _product, stress_symmetric


@dataclass(frozen=True)
class DiagnosticRecord:
    time: float
    momentum_integral: tuple[float, ...]
    energy: float
    entropy_l2: float
    sup_grad_u: float
    besov_proxy_S: float
    div_at_origin: float
    max_abs_u: float

    def is_finite(self) -> bool:
        vals = [getattr(self, f.name) for f in fields(self)]
        flat = [v for x in vals for v in (x if isinstance(x, tuple) else (x,))]
        return all(math.isfinite(v) for v in flat)


def conserved_momentum(state: SimulationState) -> np.ndarray:
    m = state.grid.helmholtz_apply(state.velocity, state.alpha)
    return state.grid.integrate(m)


def conserved_energy(state: SimulationState) -> float:
    """Integral of |u|^2 + alpha |grad u|^2."""
    grid, u = state.grid, state.velocity
    total = np.sum(u**2, axis=0)
    if state.alpha:
        total = total + state.alpha * np.sum(grid.gradient(u) ** 2, axis=(0, 1))
    return float(grid.integrate(total))


def entropy_l2(grid: Grid, u: np.ndarray) -> float:
    return float(grid.integrate(np.sum(u**2, axis=0)))


def velocity_gradient(grid: Grid, u: np.ndarray) -> np.ndarray:
    """G[i, j] = d_j u_i."""
    return grid.gradient(u)


def deformation_tensor(grid: Grid, u: np.ndarray) -> np.ndarray:
    G = grid.gradient(u)
    return 0.5 * (G + np.swapaxes(G, 0, 1))


def sup_grad(grid: Grid, u: np.ndarray) -> float:
    return float(np.max(np.abs(grid.gradient(u))))


def besov_proxy(grid: Grid, S: np.ndarray) -> float:
    """max over dyadic shells and tensor components of the sup-norm of the shell part.

    Sharp shell cutoffs make this a monitor for the criterion quantity, not a
    norm equivalent to it.
    """
    d = grid.dim
    comps = [S[i, j] for i in range(d) for j in range(i, d)] if S.ndim == d + 2 else [S]
    Sh = grid.fft(np.stack(comps))
    best = 0.0
    for m in grid.nonempty_shells():
        band = grid.ifft(Sh * (grid.shell_index == m))
        best = max(best, float(np.max(np.abs(band))))
    return best


def divergence_at_origin(grid: Grid, u: np.ndarray) -> float:
    return float(grid.divergence(u)[grid.origin_index])


def riccati_bound(d0: float, t: float) -> float:
    """Upper envelope d0 / (1 + d0 t) for div u at the reflection point."""
    if not d0 < 0:
        raise ValueError(f"initial divergence must be negative, got {d0}")
    if t >= 1.0 / abs(d0):
        raise ValueError(f"envelope has diverged: t = {t} >= 1/|d0| = {1 / abs(d0)}")
    return d0 / (1.0 + d0 * t)


def divergence_evolution_residual(
    grid: Grid, u: np.ndarray, du_dt: np.ndarray, dealias: bool = True
) -> np.ndarray:
    """Pointwise left side of the divergence equation of the alpha = 0 system.

    d_t(div u) + u.grad(div u) + 2 sum S_ij^2 + sum (Lap u_j) u_j + (div u)^2
    + sum (d_i d_j u_i) u_j. Products are dealiased like the right-hand side
    they are compared against.
    """
    d = grid.dim
    mul = _product(grid, dealias)
    G = grid.gradient(u)
    div = sum(G[j, j] for j in range(d))
    grad_div = grid.gradient(div)
    S = 0.5 * (G + np.swapaxes(G, 0, 1))
    lap = grid.laplacian(u)
    # d_j (d_i u_i) summed over i equals d_j div u
    res = grid.divergence(du_dt)
    for j in range(d):
        res = res + mul(u[j], grad_div[j]) + mul(lap[j], u[j]) + mul(grad_div[j], u[j])
        for i in range(d):
            res = res + 2 * mul(S[i, j], S[i, j])
    return res + mul(div, div)


def error_parts(grid: Grid, u_alpha: np.ndarray, u_limit: np.ndarray, alpha: float) -> tuple[float, float]:
    """(||du||_L2, sqrt(alpha) ||grad du||_L2) for du = u_alpha - u_limit."""
    if u_alpha.shape != u_limit.shape:
        raise ValueError(f"grid mismatch: {u_alpha.shape} vs {u_limit.shape}")
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    diff = u_alpha - u_limit
    l2 = grid.l2_norm(diff)
    grad = math.sqrt(alpha) * grid.l2_norm(grid.gradient(diff)) if alpha else 0.0
    return l2, grad


def error_norm(grid: Grid, u_alpha: np.ndarray, u_limit: np.ndarray, alpha: float) -> float:
    return sum(error_parts(grid, u_alpha, u_limit, alpha))


def dispersion_truncation(
    grid: Grid, u: np.ndarray, du_dt: np.ndarray, alpha: float, dealias: bool = True
) -> np.ndarray:
    """-alpha {Lap u_t + div(u (x) Lap u) + (grad u)^T Lap u}.

    This is the forcing left over when the alpha = 0 solution is inserted
    into the alpha > 0 momentum equation.
    """
    if alpha == 0:
        return np.zeros_like(u)
    d = grid.dim
    mul = _product(grid, dealias)
    lap = grid.laplacian(u)
    G = grid.gradient(u)
    flux = np.empty((d, d) + grid.shape)
    for i in range(d):
        for j in range(d):
            flux[i, j] = mul(lap[i], u[j])
    out = grid.laplacian(du_dt) + grid.divergence(flux)
    for i in range(d):
        out[i] += sum(mul(G[j, i], lap[j]) for j in range(d))
    return -alpha * out


def weak_residual_stationary(grid: Grid, u: np.ndarray, alpha: float, test_fn: np.ndarray) -> float:
    """Stationary weak form evaluated against one band-limited test field, summed over i."""
    d = grid.dim
    G = grid.gradient(u)
    Gphi = grid.gradient(test_fn)  # Gphi[i, j] = d_j phi_i
    u2 = np.sum(u**2, axis=0)
    g2 = np.sum(G**2, axis=(0, 1))
    total = np.zeros(grid.shape)
    for i in range(d):
        hess = grid.gradient(Gphi[i])  # hess[j, k] = d_k d_j phi_i
        for j in range(d):
            grad_ui_grad_uj = sum(G[i, k] * G[j, k] for k in range(d))
            di_u_dj_u = sum(G[k, i] * G[k, j] for k in range(d))
            coeff = u[i] * u[j] + alpha * grad_ui_grad_uj - alpha * di_u_dj_u
            if i == j:
                coeff = coeff + 0.5 * u2 + 0.5 * alpha * g2
            total += coeff * Gphi[i, j]
            if alpha:
                total += alpha * u[j] * sum(G[i, k] * hess[j, k] for k in range(d))
    return float(grid.integrate(total))


def liouville_trace_functional(grid: Grid, u: np.ndarray, alpha: float) -> float:
    """Integral of (N+2)/2 |u|^2 + alpha N/2 |grad u|^2 with N the dimension."""
    n = grid.dim
    dens = 0.5 * (n + 2) * np.sum(u**2, axis=0)
    if alpha:
        dens = dens + 0.5 * alpha * n * np.sum(grid.gradient(u) ** 2, axis=(0, 1))
    return float(grid.integrate(dens))


def trace_of_stress(grid: Grid, u: np.ndarray, alpha: float) -> np.ndarray:
    Ta = stress_symmetric(grid, u, alpha)
    return sum(Ta[i, i] for i in range(grid.dim))


def record(state: SimulationState) -> DiagnosticRecord:
    grid, u = state.grid, state.velocity
    mom = conserved_momentum(state)
    return DiagnosticRecord(
        time=float(state.time),
        momentum_integral=tuple(float(v) for v in np.atleast_1d(mom)),
        energy=conserved_energy(state),
        entropy_l2=entropy_l2(grid, u),
        sup_grad_u=sup_grad(grid, u),
        besov_proxy_S=besov_proxy(grid, deformation_tensor(grid, u)),
        div_at_origin=divergence_at_origin(grid, u),
        max_abs_u=float(np.max(np.abs(u))),
    )


class CriterionIntegral:
    """Observer accumulating the running time integral of the Besov proxy (trapezoid rule)."""

    def __init__(self):
        self.times: list[float] = []
        self.values: list[float] = []
        self.integral = 0.0
        self.history: list[float] = []

    def __call__(self, state: SimulationState, rec: DiagnosticRecord) -> None:
        if self.times:
            dt = rec.time - self.times[-1]
            self.integral += 0.5 * dt * (rec.besov_proxy_S + self.values[-1])
        self.times.append(rec.time)
        self.values.append(rec.besov_proxy_S)
        self.history.append(self.integral)
