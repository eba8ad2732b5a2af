"""Explicit Runge-Kutta stepping with blow-up guards.

The prognostic variable is momentum: every stage forms ``m = (1 - alpha Lap) u``,
adds the weighted tendencies, and recovers ``u`` through the Helmholtz inverse.
At alpha = 0 both maps are the identity and the stages act on u directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from . import diagnostics
from .fields import SimulationState
from .rhs import RHS_FORMS, NonFiniteTendency

Tendency = Callable[[SimulationState], np.ndarray]
Observer = Callable[[SimulationState, "diagnostics.DiagnosticRecord"], None]


class Termination(str, Enum):
    COMPLETED = "completed"
    BLOWUP_NORM = "blowup_norm"
    DT_UNDERFLOW = "dt_underflow"
    NAN_DETECTED = "nan_detected"


class NoBlowupEstimate(ValueError):
    pass


@dataclass
class IntegratorConfig:
    dt: float
    t_end: float
    scheme: str = "rk4"
    cfl_safety: float = 0.5
    adaptive: bool = False
    # Guard on ||grad u||_inf. None means blowup_growth times its initial value.
    blowup_norm_threshold: float | None = None
    blowup_growth: float = 10.0
    dt_floor: float = 1e-10
    dealias_products: bool = True
    form: str = "convective"
    sample_stride: int = 1

    def __post_init__(self):
        errors = []
        if not self.dt > 0:
            errors.append(f"dt must be positive, got {self.dt}")
        if self.dt > self.t_end:
            errors.append(f"dt={self.dt} exceeds t_end={self.t_end}")
        if self.scheme not in SCHEMES:
            errors.append(f"unknown scheme {self.scheme!r}")
        if not 0 < self.cfl_safety <= 1:
            errors.append(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if not self.dt_floor < self.dt:
            errors.append("dt_floor must be below dt")
        if self.form not in RHS_FORMS:
            errors.append(f"unknown right-hand side form {self.form!r}")
        if self.blowup_norm_threshold is not None and not self.blowup_norm_threshold > 0:
            errors.append("blowup_norm_threshold must be positive")
        if not self.blowup_growth > 1:
            errors.append("blowup_growth must exceed 1")
        if self.sample_stride < 1:
            errors.append("sample_stride must be >= 1")
        if errors:
            raise ValueError("; ".join(errors))


@dataclass
class TerminationReport:
    reason: Termination
    t_final: float
    steps: int
    estimated_blowup_time: float | None = None
    guard_value: float | None = None
    guard_threshold: float | None = None
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "reason": self.reason.value,
            "t_final": self.t_final,
            "steps": self.steps,
            "estimated_blowup_time": self.estimated_blowup_time,
            "guard_value": self.guard_value,
            "guard_threshold": self.guard_threshold,
            "notes": list(self.notes),
        }


def _stage(state: SimulationState, m0: np.ndarray, incr: np.ndarray, dt: float) -> SimulationState:
    grid = state.grid
    u = grid.helmholtz_invert(m0 + incr, state.alpha)
    return SimulationState(state.time + dt, u, state.alpha, grid)


def rk4_step(state: SimulationState, rhs: Tendency, dt: float) -> SimulationState:
    """Classical four-stage Runge-Kutta step of the momentum equation.

    Raises NonFiniteTendency if any stage produces NaN/Inf.
    """
    grid = state.grid
    m0 = grid.helmholtz_apply(state.velocity, state.alpha)
    k1 = rhs(state)
    k2 = rhs(_stage(state, m0, 0.5 * dt * k1, 0.5 * dt))
    k3 = rhs(_stage(state, m0, 0.5 * dt * k2, 0.5 * dt))
    k4 = rhs(_stage(state, m0, dt * k3, dt))
    new = _stage(state, m0, dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4), dt)
    if not np.all(np.isfinite(new.velocity)):
        raise NonFiniteTendency("non-finite state after RK4 step")
    return new


def rk2_step(state: SimulationState, rhs: Tendency, dt: float) -> SimulationState:
    """Midpoint rule."""
    grid = state.grid
    m0 = grid.helmholtz_apply(state.velocity, state.alpha)
    k1 = rhs(state)
    k2 = rhs(_stage(state, m0, 0.5 * dt * k1, 0.5 * dt))
    new = _stage(state, m0, dt * k2, dt)
    if not np.all(np.isfinite(new.velocity)):
        raise NonFiniteTendency("non-finite state after RK2 step")
    return new


SCHEMES = {"rk4": rk4_step, "rk2": rk2_step}


def resolve_rhs(cfg: IntegratorConfig, alpha: float) -> Tendency:
    form = cfg.form
    if form == "zero_alpha" and alpha != 0:
        raise ValueError("form 'zero_alpha' needs alpha == 0")
    fn = RHS_FORMS[form]
    dealias = cfg.dealias_products
    return lambda s: fn(s, dealias=dealias)


def cfl_dt(state: SimulationState, cfg: IntegratorConfig, grad_sup: float) -> float:
    """cfl_safety / (max|u| k_max + ||grad u||_inf), capped at cfg.dt.

    The gradient term keeps the step below the Riccati time scale when
    gradients steepen.
    """
    kmax = state.grid.k_max(cfg.dealias_products)
    rate = float(np.max(np.abs(state.velocity))) * kmax + grad_sup
    if rate == 0:
        return cfg.dt
    return min(cfg.dt, cfg.cfl_safety / rate)


def estimate_blowup_time(norm_series: Sequence[tuple[float, float]], window: float = 0.3) -> float:
    """Fit value ~ c / (T - t) on the last ``window`` fraction of samples; return T.

    1/value is linear in t under that model, so the fit is an ordinary least
    squares line through (t, 1/value). Raises NoBlowupEstimate when the tail is
    not strictly increasing.
    """
    series = np.asarray(norm_series, dtype=float)
    if series.ndim != 2 or len(series) < 3:
        raise NoBlowupEstimate("need at least three samples")
    start = min(int(len(series) * (1 - window)), len(series) - 3)
    tail = series[start:]
    t, v = tail[:, 0], tail[:, 1]
    if np.any(np.diff(v) <= 0) or np.any(v <= 0):
        raise NoBlowupEstimate("tail of the series is not strictly increasing")
    slope, intercept = np.polyfit(t, 1.0 / v, 1)
    if not slope < 0:
        raise NoBlowupEstimate("fitted growth does not diverge")
    return float(-intercept / slope)


def integrate(
    s0: SimulationState,
    cfg: IntegratorConfig,
    observers: Sequence[Observer] = (),
    rhs: Tendency | None = None,
) -> tuple[SimulationState, TerminationReport, list[diagnostics.DiagnosticRecord]]:
    """Advance s0 until cfg.t_end or a guard trips.

    Observers see (state, record) every ``sample_stride`` steps, plus the
    initial and final states. Guard trips are reported, never raised.
    """
    step_fn = SCHEMES[cfg.scheme]
    rhs = rhs or resolve_rhs(cfg, s0.alpha)
    grid = s0.grid

    def emit(state):
        rec = diagnostics.record(state)
        records.append(rec)
        for obs in observers:
            obs(state, rec)

    records: list[diagnostics.DiagnosticRecord] = []
    state = s0
    g = diagnostics.sup_grad(grid, state.velocity)
    threshold = cfg.blowup_norm_threshold
    if threshold is None:
        threshold = cfg.blowup_growth * g
    growth = [(state.time, g)]
    emit(state)

    steps = 0
    reason = Termination.COMPLETED
    # float slack so t_end is reached without an extra sliver step
    t_tol = 1e-12 * max(1.0, abs(cfg.t_end))
    while state.time < cfg.t_end - t_tol:
        dt = cfl_dt(state, cfg, g) if cfg.adaptive else cfg.dt
        if cfg.adaptive and dt < cfg.dt_floor:
            reason = Termination.DT_UNDERFLOW
            break
        dt = min(dt, cfg.t_end - state.time)
        try:
            new = step_fn(state, rhs, dt)
        except NonFiniteTendency:
            reason = Termination.NAN_DETECTED
            break
        steps += 1
        state = new
        g = diagnostics.sup_grad(grid, state.velocity)
        growth.append((state.time, g))
        if not math.isfinite(g):
            reason = Termination.NAN_DETECTED
            break
        if threshold > 0 and g > threshold:
            reason = Termination.BLOWUP_NORM
            emit(state)
            break
        if steps % cfg.sample_stride == 0:
            emit(state)

    if records[-1].time != state.time:
        emit(state)

    report = TerminationReport(reason, float(state.time), steps, guard_value=g, guard_threshold=threshold)
    if reason is not Termination.COMPLETED:
        try:
            report.estimated_blowup_time = estimate_blowup_time(growth)
        except NoBlowupEstimate as exc:
            report.notes.append(f"no blow-up estimate: {exc}")
    return state, report, records
