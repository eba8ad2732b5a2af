"""Scripted studies with pass/fail verdicts.

Each ``run_*`` function takes an :class:`~epsim.config.ExperimentConfig`,
integrates, and returns a report dataclass whose ``passed`` flag is what the
CLI turns into an exit status.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics as dg
from . import initial
from .config import ExperimentConfig
from .fields import SimulationState, reflection_defect
from .grid import Grid
from .integrate import IntegratorConfig, Termination, TerminationReport, integrate


def make_grid(cfg: ExperimentConfig) -> Grid:
    return Grid(cfg.dim, cfg.points, cfg.length)


def integrator_config(cfg: ExperimentConfig, alpha: float, **overrides) -> IntegratorConfig:
    form = cfg.integrator.form
    if form == "zero_alpha" and alpha != 0:
        # the alpha > 0 members of a sweep share a config written for alpha = 0
        form = "convective"
    opts = dict(
        dt=cfg.dt,
        t_end=cfg.t_end,
        scheme=cfg.integrator.scheme,
        cfl_safety=cfg.integrator.cfl_safety,
        adaptive=cfg.integrator.adaptive,
        blowup_norm_threshold=cfg.integrator.blowup_norm_threshold,
        blowup_growth=cfg.integrator.blowup_growth,
        dt_floor=cfg.integrator.dt_floor,
        dealias_products=cfg.integrator.dealias,
        form=form,
        sample_stride=cfg.sample_stride,
    )
    opts.update(overrides)
    return IntegratorConfig(**opts)


def initial_state(cfg: ExperimentConfig, alpha: float, grid: Grid | None = None) -> SimulationState:
    grid = grid or make_grid(cfg)
    u0 = initial.build(grid, cfg.initial_data, alpha, cfg.integrator.dealias)
    return SimulationState(0.0, u0, alpha, grid)


def _scalar_alpha(cfg: ExperimentConfig) -> float:
    if isinstance(cfg.alpha, tuple):
        raise ValueError("this experiment needs a single alpha, got a list")
    return cfg.alpha


# -- generic run ---------------------------------------------------------------


@dataclass
class RunResult:
    state: SimulationState
    report: TerminationReport
    records: list[dg.DiagnosticRecord]
    criterion_integral: float

    @property
    def passed(self) -> bool:
        return self.report.reason is Termination.COMPLETED


def run_simulation(cfg: ExperimentConfig) -> RunResult:
    alpha = _scalar_alpha(cfg)
    s0 = initial_state(cfg, alpha)
    crit = dg.CriterionIntegral()
    state, report, records = integrate(s0, integrator_config(cfg, alpha), [crit])
    return RunResult(state, report, records, crit.integral)


# -- conservation ----------------------------------------------------------------


@dataclass
class ConservationReport:
    records: list[dg.DiagnosticRecord]
    termination: TerminationReport
    momentum_drift: float
    energy_drift: float
    momentum_tol: float
    energy_tol: float

    @property
    def passed(self) -> bool:
        return (
            self.termination.reason is Termination.COMPLETED
            and self.momentum_drift <= self.momentum_tol
            and self.energy_drift <= self.energy_tol
        )


def relative_drifts(records: list[dg.DiagnosticRecord], momentum_scale: float) -> tuple[float, float]:
    """Max relative drift of the momentum vector and of the energy over a trajectory.

    At alpha = 0 the energy column equals the L2 entropy, so one number covers both.
    """
    p0 = np.array(records[0].momentum_integral)
    e0 = records[0].energy
    dp = max(float(np.linalg.norm(np.array(r.momentum_integral) - p0)) for r in records)
    de = max(abs(r.energy - e0) for r in records)
    mom = dp / momentum_scale if momentum_scale > 0 else dp
    en = de / e0 if e0 > 0 else de
    return mom, en


def momentum_scale(s0: SimulationState) -> float:
    """|P(0)|, or the L1 size of m0 when P(0) is round-off (zero-mean data)."""
    grid = s0.grid
    m0 = grid.helmholtz_apply(s0.velocity, s0.alpha)
    l1 = float(grid.integrate(np.sqrt(np.sum(m0**2, axis=0))))
    p0 = float(np.linalg.norm(grid.integrate(m0)))
    return p0 if p0 > 1e-8 * l1 else l1


def run_conservation_suite(cfg: ExperimentConfig) -> ConservationReport:
    alpha = _scalar_alpha(cfg)
    s0 = initial_state(cfg, alpha)
    state, report, records = integrate(s0, integrator_config(cfg, alpha))
    mom, en = relative_drifts(records, momentum_scale(s0))
    return ConservationReport(records, report, mom, en, cfg.checks.momentum_tol, cfg.checks.energy_tol)


# -- blow-up -------------------------------------------------------------------------


@dataclass
class BlowupSample:
    time: float
    div_origin: float
    envelope: float
    sup_grad_u: float
    symmetry_defect: float
    max_abs_u: float


@dataclass
class BlowupReport:
    d0: float
    riccati_time: float
    samples: list[BlowupSample]
    termination: TerminationReport
    records: list[dg.DiagnosticRecord]
    criterion_integral: float
    trip_margin: float
    envelope_tol: float
    symmetry_tol: float
    failures: list[str] = field(default_factory=list)

    @property
    def trip_time(self) -> float:
        return self.termination.t_final

    @property
    def envelope_violation(self) -> float:
        """Largest div u(0,t) - bound(t) - tol (1 + |bound|); <= 0 when the envelope holds."""
        worst = -math.inf
        for s in self.samples:
            if math.isfinite(s.envelope):
                slack = s.div_origin - s.envelope - self.envelope_tol * (1 + abs(s.envelope))
                worst = max(worst, slack)
        return worst

    @property
    def max_symmetry_defect(self) -> float:
        return max(s.symmetry_defect / s.max_abs_u for s in self.samples if s.max_abs_u > 0)

    @property
    def passed(self) -> bool:
        return not self.failures


def _envelope(d0: float, t: float) -> float:
    try:
        return dg.riccati_bound(d0, t)
    except ValueError:
        return -math.inf


def run_blowup_study(cfg: ExperimentConfig) -> BlowupReport:
    alpha = _scalar_alpha(cfg)
    if alpha != 0:
        raise ValueError("the blow-up study runs the alpha = 0 system")
    if cfg.initial_data.kind not in ("gradient_cosine", "odd_random"):
        raise ValueError("blow-up data must be reflection symmetric (gradient_cosine or odd_random)")
    s0 = initial_state(cfg, 0.0)
    grid = s0.grid
    d0 = dg.divergence_at_origin(grid, s0.velocity)
    if not d0 < 0:
        raise ValueError(f"need div u0(0) < 0, got {d0}")
    riccati_time = 1.0 / abs(d0)

    samples: list[BlowupSample] = []

    def watch(state: SimulationState, rec: dg.DiagnosticRecord) -> None:
        samples.append(
            BlowupSample(
                time=rec.time,
                div_origin=rec.div_at_origin,
                envelope=_envelope(d0, rec.time),
                sup_grad_u=rec.sup_grad_u,
                symmetry_defect=reflection_defect(grid, state.velocity),
                max_abs_u=rec.max_abs_u,
            )
        )

    crit = dg.CriterionIntegral()
    # run long enough that a missed blow-up is visible
    t_end = max(cfg.t_end, 2 * riccati_time)
    icfg = integrator_config(cfg, 0.0, t_end=t_end)
    state, report, records = integrate(s0, icfg, [watch, crit])

    out = BlowupReport(
        d0=d0,
        riccati_time=riccati_time,
        samples=samples,
        termination=report,
        records=records,
        criterion_integral=crit.integral,
        trip_margin=cfg.checks.trip_margin,
        envelope_tol=cfg.checks.envelope_tol,
        symmetry_tol=cfg.checks.symmetry_tol,
    )
    if report.reason not in (Termination.BLOWUP_NORM, Termination.DT_UNDERFLOW):
        out.failures.append(f"guard did not trip (reason {report.reason.value})")
    if report.t_final > riccati_time * (1 + cfg.checks.trip_margin):
        out.failures.append(
            f"trip time {report.t_final:.4f} exceeds 1/|d0| = {riccati_time:.4f} + {cfg.checks.trip_margin:.0%}"
        )
    if out.envelope_violation > 0:
        out.failures.append(f"Riccati envelope violated by {out.envelope_violation:.3e}")
    if out.max_symmetry_defect > cfg.checks.symmetry_tol:
        out.failures.append(f"reflection symmetry defect {out.max_symmetry_defect:.3e}")
    return out


# -- zero-alpha sweep ----------------------------------------------------------------


@dataclass
class SweepRow:
    alpha: float
    error_norm_final: float
    l2_part: float
    grad_part: float


@dataclass
class SweepResult:
    rows: list[SweepRow]
    fitted_slope: float
    fit_window: tuple[float, float]
    slope_range: tuple[float, float]
    aborted: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        errs = [r.error_norm_final for r in self.rows]
        return all(a > b for a, b in zip(errs, errs[1:]))

    @property
    def passed(self) -> bool:
        lo, hi = self.slope_range
        return not self.aborted and self.monotone and lo <= self.fitted_slope <= hi


def fit_loglog_slope(x, y) -> float:
    slope, _ = np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)
    return float(slope)


def run_alpha_sweep(cfg: ExperimentConfig, workers: int = 1, reference: str = "zero_alpha") -> SweepResult:
    """Error of EP-alpha against the alpha = 0 solution at t_end for every alpha in the list.

    ``reference="self"`` replaces the alpha = 0 run by each alpha run itself
    (a sanity mode that must give zero error).
    """
    alphas = sorted(cfg.alpha if isinstance(cfg.alpha, tuple) else (cfg.alpha,), reverse=True)
    if any(a <= 0 for a in alphas):
        raise ValueError("sweep alphas must be positive")
    grid = make_grid(cfg)

    def run(alpha: float):
        s0 = initial_state(cfg, alpha, grid)
        state, report, _ = integrate(s0, integrator_config(cfg, alpha, sample_stride=10**9))
        return alpha, state, report

    s_ref = initial_state(cfg, 0.0, grid)
    ref_state, ref_report, _ = integrate(
        s_ref, integrator_config(cfg, 0.0, form="zero_alpha", sample_stride=10**9)
    )

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(run, alphas))

    rows, notes = [], []
    aborted = ref_report.reason is not Termination.COMPLETED
    if aborted:
        notes.append(f"alpha=0 reference stopped early: {ref_report.reason.value} at t={ref_report.t_final}")
    for alpha, state, report in results:
        if report.reason is not Termination.COMPLETED:
            aborted = True
            notes.append(f"alpha={alpha} stopped early: {report.reason.value} at t={report.t_final}")
            continue
        limit = state.velocity if reference == "self" else ref_state.velocity
        l2, gr = dg.error_parts(grid, state.velocity, limit, alpha)
        rows.append(SweepRow(alpha, l2 + gr, l2, gr))
    rows.sort(key=lambda r: r.alpha, reverse=True)
    usable = [r for r in rows if r.error_norm_final > 0]
    slope = fit_loglog_slope([r.alpha for r in usable], [r.error_norm_final for r in usable]) if len(usable) >= 2 else math.nan
    window = (min(alphas), max(alphas))
    return SweepResult(rows, slope, window, (cfg.checks.slope_min, cfg.checks.slope_max), aborted, notes)


# -- traveling wave --------------------------------------------------------------------


@dataclass
class WaveReport:
    speed: float
    target_speed: float
    shape_error: float
    positions: list[tuple[float, float]]
    termination: TerminationReport
    records: list[dg.DiagnosticRecord]
    speed_tol: float
    shape_tol: float

    @property
    def speed_error(self) -> float:
        if self.target_speed == 0:
            return abs(self.speed)
        return abs(self.speed - self.target_speed) / self.target_speed

    @property
    def passed(self) -> bool:
        return (
            self.termination.reason is Termination.COMPLETED
            and self.speed_error <= self.speed_tol
            and self.shape_error <= self.shape_tol
        )


def peak_position(grid: Grid, u: np.ndarray) -> float:
    """Location of max u with a three-point parabolic refinement."""
    n = grid.n
    j = int(np.argmax(u))
    ym, y0, yp = u[(j - 1) % n], u[j], u[(j + 1) % n]
    curv = ym - 2 * y0 + yp
    off = 0.5 * (ym - yp) / curv if curv != 0 else 0.0
    return float(grid.x[j] + off * grid.spacing)


def shift(grid: Grid, f: np.ndarray, distance: float) -> np.ndarray:
    """Return f(x + distance) by a Fourier phase shift."""
    return grid.ifft(grid.fft(f) * np.exp(1j * grid.wavenumbers[0] * distance))


def run_traveling_wave(cfg: ExperimentConfig) -> WaveReport:
    alpha = _scalar_alpha(cfg)
    if cfg.dim != 1 or cfg.initial_data.kind != "peakon":
        raise ValueError("the traveling-wave study needs dim = 1 and peakon data")
    s0 = initial_state(cfg, alpha)
    grid = s0.grid
    c = cfg.initial_data.speed
    positions: list[tuple[float, float]] = []

    def track(state: SimulationState, rec: dg.DiagnosticRecord) -> None:
        positions.append((rec.time, peak_position(grid, state.velocity[0])))

    state, report, records = integrate(s0, integrator_config(cfg, alpha), [track])

    if c == 0:
        speed = 0.0
    else:
        p = np.array(positions)
        # undo periodic wrap-around before the linear fit
        x = np.unwrap(p[:, 1], period=grid.length)
        speed = float(np.polyfit(p[:, 0], x, 1)[0])
    u0 = s0.velocity[0]
    norm0 = grid.l2_norm(u0)
    moved = shift(grid, state.velocity[0], c * state.time)
    shape = grid.l2_norm(moved - u0) / norm0 if norm0 > 0 else grid.l2_norm(moved)
    return WaveReport(
        speed, c, shape, positions, report, records, cfg.checks.speed_tol, cfg.checks.shape_tol
    )
