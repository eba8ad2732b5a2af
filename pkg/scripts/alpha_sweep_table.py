"""Error against the alpha = 0 solution, with the two error parts, for the sweep config.

    python scripts/alpha_sweep_table.py [--threads 2]
"""
import argparse
from pathlib import Path

from epsim.config import parse_config
from epsim.experiments import run_alpha_sweep

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=ROOT / "configs" / "sweep.cfg")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    res = run_alpha_sweep(parse_config(args.config.read_text()), workers=args.threads)
    print(f"{'alpha':>8} {'total':>10} {'L2':>10} {'grad':>10}")
    for r in res.rows:
        print(f"{r.alpha:8.0e} {r.error_norm_final:10.3e} {r.l2_part:10.3e} {r.grad_part:10.3e}")
    print(f"log-log slope {res.fitted_slope:.4f}  monotone={res.monotone}")
    for note in res.notes:
        print("note:", note)


if __name__ == "__main__":
    main()
