"""Peakon speed and shape error against grid size and mollifier width.

    python scripts/peakon_resolution.py --points 512 1024 2048 --smoothing 0.05 0.01
"""
import argparse
from dataclasses import replace
from pathlib import Path

from epsim.config import parse_config
from epsim.experiments import run_traveling_wave

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=ROOT / "configs" / "peakon.cfg")
    ap.add_argument("--points", type=int, nargs="+", default=[512, 1024, 2048])
    ap.add_argument("--smoothing", type=float, nargs="+", default=[0.05, 0.02, 0.01])
    args = ap.parse_args()
    base = parse_config(args.config.read_text())
    print(f"{'N':>5} {'eps':>6} {'speed':>8} {'shape':>8}")
    for eps in args.smoothing:
        for n in args.points:
            cfg = replace(base, points=n, initial_data=replace(base.initial_data, smoothing=eps))
            rep = run_traveling_wave(cfg)
            print(f"{n:>5} {eps:6.3f} {rep.speed:8.4f} {rep.shape_error:8.2%}")


if __name__ == "__main__":
    main()
