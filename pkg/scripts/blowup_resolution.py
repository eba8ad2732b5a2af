"""Guard trip time and Riccati envelope slack for several grid sizes.

    python scripts/blowup_resolution.py --points 64 128 256
"""
import argparse
from dataclasses import replace
from pathlib import Path

from epsim.config import parse_config
from epsim.experiments import run_blowup_study

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=ROOT / "configs" / "blowup.cfg")
    ap.add_argument("--points", type=int, nargs="+", default=[64, 128, 256])
    args = ap.parse_args()
    base = parse_config(args.config.read_text())
    print(f"{'N':>5} {'reason':>12} {'t_trip':>8} {'T_est':>8} {'slack':>10} {'sym':>9}")
    for n in args.points:
        rep = run_blowup_study(replace(base, points=n))
        est = rep.termination.estimated_blowup_time
        print(
            f"{n:>5} {rep.termination.reason.value:>12} {rep.trip_time:8.4f} "
            f"{est if est is not None else float('nan'):8.4f} {rep.envelope_violation:10.2e} "
            f"{rep.max_symmetry_defect:9.1e}"
        )


if __name__ == "__main__":
    main()
