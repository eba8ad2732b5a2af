"""Command line entry point.

    epsim <run|sweep-alpha|blowup|wave|conserve|check> --config PATH [--out DIR]
          [--threads N] [--seed U64]

Exit status: 0 pass, 1 experiment failed its checks, 2 config or usage error.
``EPSIM_OUT`` in the environment overrides ``--out``.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, experiments, grid as grid_mod
from .config import ConfigError, ExperimentConfig, format_config, parse_config
from .diagnostics import DiagnosticRecord
from .fields import SimulationState, write_field

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

DIAG_COLUMNS = [
    "time", "mom_x", "mom_y", "energy", "entropy_l2",
    "sup_grad_u", "besov_proxy", "div_origin", "max_u",
]
SWEEP_COLUMNS = ["alpha", "err_total", "err_l2", "err_grad"]


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(format_config(cfg).encode()).hexdigest()


def write_diagnostics(path: Path, records: list[DiagnosticRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DIAG_COLUMNS)
        for r in records:
            mom = list(r.momentum_integral) + [0.0] * (2 - len(r.momentum_integral))
            row = [r.time, *mom, r.energy, r.entropy_l2, r.sup_grad_u,
                   r.besov_proxy_S, r.div_at_origin, r.max_abs_u]
            w.writerow([repr(float(v)) for v in row])


def write_sweep(path: Path, result: experiments.SweepResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for r in result.rows:
            w.writerow([repr(float(v)) for v in (r.alpha, r.error_norm_final, r.l2_part, r.grad_part)])


# -- subcommands ---------------------------------------------------------------
# Each returns (passed, termination dict or None, summary dict, outputs list).


def _cmd_run(cfg, out: Path, threads: int):
    res = experiments.run_simulation(cfg)
    write_diagnostics(out / "diagnostics.csv", res.records)
    write_field(out / "final_field.txt", res.state)
    summary = {"criterion_integral": res.criterion_integral}
    return res.passed, res.report.as_dict(), summary, ["diagnostics.csv", "final_field.txt"]


def _cmd_conserve(cfg, out: Path, threads: int):
    rep = experiments.run_conservation_suite(cfg)
    write_diagnostics(out / "diagnostics.csv", rep.records)
    summary = {
        "momentum_drift": rep.momentum_drift,
        "energy_drift": rep.energy_drift,
        "momentum_tol": rep.momentum_tol,
        "energy_tol": rep.energy_tol,
    }
    return rep.passed, rep.termination.as_dict(), summary, ["diagnostics.csv"]


def _cmd_blowup(cfg, out: Path, threads: int):
    rep = experiments.run_blowup_study(cfg)
    write_diagnostics(out / "diagnostics.csv", rep.records)
    with open(out / "envelope.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "div_origin", "envelope", "sup_grad_u", "symmetry_defect"])
        for s in rep.samples:
            w.writerow([repr(float(v)) for v in (s.time, s.div_origin, s.envelope, s.sup_grad_u, s.symmetry_defect)])
    summary = {
        "d0": rep.d0,
        "riccati_time": rep.riccati_time,
        "trip_time": rep.trip_time,
        "envelope_violation": rep.envelope_violation,
        "max_symmetry_defect": rep.max_symmetry_defect,
        "criterion_integral": rep.criterion_integral,
        "failures": rep.failures,
    }
    return rep.passed, rep.termination.as_dict(), summary, ["diagnostics.csv", "envelope.csv"]


def _cmd_sweep(cfg, out: Path, threads: int):
    res = experiments.run_alpha_sweep(cfg, workers=threads)
    write_sweep(out / "sweep_summary.csv", res)
    summary = {
        "fitted_slope": res.fitted_slope,
        "slope_range": list(res.slope_range),
        "monotone": res.monotone,
        "aborted": res.aborted,
        "notes": res.notes,
    }
    return res.passed, None, summary, ["sweep_summary.csv"]


def _cmd_wave(cfg, out: Path, threads: int):
    rep = experiments.run_traveling_wave(cfg)
    write_diagnostics(out / "diagnostics.csv", rep.records)
    with open(out / "peak_track.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "peak_x"])
        for t, x in rep.positions:
            w.writerow([repr(float(t)), repr(float(x))])
    summary = {
        "speed": rep.speed,
        "target_speed": rep.target_speed,
        "speed_error": rep.speed_error,
        "shape_error": rep.shape_error,
    }
    return rep.passed, rep.termination.as_dict(), summary, ["diagnostics.csv", "peak_track.csv"]


COMMANDS = {
    "run": _cmd_run,
    "conserve": _cmd_conserve,
    "blowup": _cmd_blowup,
    "sweep-alpha": _cmd_sweep,
    "wave": _cmd_wave,
}


def quick_checks() -> list[tuple[str, bool, float]]:
    """Cheap self-tests on a 32^2 grid: (name, passed, measured value)."""
    from . import diagnostics as dg
    from .grid import Grid
    from .rhs import flux_eigenvalues, flux_jacobian, rhs_conservative, rhs_convective

    rng = np.random.default_rng(0)
    g = Grid(2, 32)
    u = g.random_band_limited(rng, 2, band=6)
    s = SimulationState(0.0, u, 0.5, g)
    out = []

    a, b = rhs_convective(s), rhs_conservative(s)
    diff = float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(a))))
    out.append(("rhs forms agree", diff <= 1e-10, diff))

    power = abs(float(g.integrate(np.sum(u * a, axis=0))))
    out.append(("energy is orthogonal to the tendency", power <= 1e-10 * dg.conserved_energy(s), power))

    back = g.helmholtz_invert(g.helmholtz_apply(u, 0.5), 0.5)
    err = float(np.max(np.abs(back - u)))
    out.append(("Helmholtz round trip", err <= 1e-12, err))

    worst = 0.0
    for _ in range(20):
        up = rng.normal(size=3)
        e = rng.normal(size=3)
        e /= np.linalg.norm(e)
        num = np.sort(np.linalg.eigvals(flux_jacobian(up, e)).real)
        worst = max(worst, float(np.max(np.abs(num - flux_eigenvalues(up, e)))))
    out.append(("flux eigenvalues", worst <= 1e-10, worst))
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="epsim", description="Euler-Poincare pseudo-spectral experiments")
    p.add_argument("--version", action="version", version=f"epsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--out", type=Path, default=None, help="output directory (EPSIM_OUT wins)")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--seed", type=int, default=None, help="override initial_data.seed (u64)")
    sub.add_parser("check", help="fast invariant checks, no config needed")
    return p


def load_config(path: Path, seed: int | None) -> ExperimentConfig:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc.strerror}"]) from None
    cfg = parse_config(text)
    if seed is not None:
        if not 0 <= seed < 2**64:
            raise ConfigError([f"--seed must be an unsigned 64-bit integer, got {seed}"])
        cfg = replace(cfg, initial_data=replace(cfg.initial_data, seed=seed))
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "check":
        ok = True
        for name, passed, value in quick_checks():
            print(f"{'PASS' if passed else 'FAIL'}  {name}  ({value:.3e})")
            ok &= passed
        return EXIT_PASS if ok else EXIT_FAIL

    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config, args.seed)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    out_root = os.environ.get("EPSIM_OUT") or args.out or Path(cfg.output_dir)
    out = Path(out_root) / cfg.name
    out.mkdir(parents=True, exist_ok=True)
    grid_mod.FFT_WORKERS = args.threads

    started = _now()
    try:
        passed, termination, summary, outputs = COMMANDS[args.command](cfg, out, args.threads)
    except ValueError as exc:
        # config is well formed but does not fit this experiment
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    finally:
        grid_mod.FFT_WORKERS = None

    (out / "config.txt").write_text(format_config(cfg))
    manifest = {
        "command": args.command,
        "config_hash": config_hash(cfg),
        "started": started,
        "finished": _now(),
        "version": __version__,
        "passed": passed,
        "termination": termination,
        "summary": summary,
        "outputs": outputs + ["config.txt"],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=float) + "\n")
    print(f"{args.command}: {'PASS' if passed else 'FAIL'}  ({out})")
    for k, v in summary.items():
        print(f"  {k}: {v}")
    return EXIT_PASS if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
