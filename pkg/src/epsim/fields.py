"""Velocity/momentum fields, simulation state, reflection symmetry and field dumps.

A velocity field is an array of shape ``(dim,) + grid.shape``. Momentum is a
derived quantity ``m = (1 - alpha*Laplacian) u`` and carries its alpha so it
can be inverted without extra arguments.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import Grid

FIELD_MAGIC = "#epsim-field v1"


@dataclass(frozen=True)
class MomentumField:
    grid: Grid
    values: np.ndarray
    alpha: float


@dataclass(frozen=True)
class SimulationState:
    time: float
    velocity: np.ndarray
    alpha: float
    grid: Grid

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        expected = (self.grid.dim,) + self.grid.shape
        if self.velocity.shape != expected:
            raise ValueError(f"velocity shape {self.velocity.shape} != {expected}")

    def advanced(self, velocity: np.ndarray, dt: float) -> SimulationState:
        return SimulationState(self.time + dt, velocity, self.alpha, self.grid)


def momentum_from_velocity(grid: Grid, u: np.ndarray, alpha: float) -> MomentumField:
    return MomentumField(grid, grid.helmholtz_apply(u, alpha), alpha)


def velocity_from_momentum(m: MomentumField) -> np.ndarray:
    return m.grid.helmholtz_invert(m.values, m.alpha)


def reflect_symmetrize(grid: Grid, u: np.ndarray) -> np.ndarray:
    """Odd part of u under x -> -x, i.e. (u(x) - u(-x)) / 2 componentwise.

    The result satisfies ``v(-x) == -v(x)`` exactly on the grid, which is the
    reflection symmetry u -> -u(-x) used by the blow-up argument.
    """
    return 0.5 * (u - grid.reflect(u))


def reflection_defect(grid: Grid, u: np.ndarray) -> float:
    """max |u(x) + u(-x)|; zero for reflection-symmetric data."""
    return float(np.max(np.abs(u + grid.reflect(u))))


# -- serialization -----------------------------------------------------------
#
# Text layout (stable):
#   line 1:  #epsim-field v1
#   line 2:  # dim=<d> n=<N> length=<L> alpha=<alpha> time=<t>
#   line 3:  u1,...,ud
#   then N**d rows, one per grid point in C (row-major) index order.
# Floats are written with repr() so a round trip is bit exact.


def write_field(path: str | Path, state: SimulationState) -> None:
    grid = state.grid
    buf = io.StringIO()
    buf.write(FIELD_MAGIC + "\n")
    buf.write(
        f"# dim={grid.dim} n={grid.n} length={grid.length!r} "
        f"alpha={float(state.alpha)!r} time={float(state.time)!r}\n"
    )
    buf.write(",".join(f"u{i + 1}" for i in range(grid.dim)) + "\n")
    flat = state.velocity.reshape(grid.dim, -1).T
    for row in flat:
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    Path(path).write_text(buf.getvalue())


def read_field(path: str | Path) -> SimulationState:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != FIELD_MAGIC:
        raise ValueError(f"{path}: not an epsim field dump")
    meta = dict(tok.split("=", 1) for tok in lines[1].lstrip("#").split())
    grid = Grid(int(meta["dim"]), int(meta["n"]), float(meta["length"]))
    data = np.loadtxt(lines[3:], delimiter=",", ndmin=2)
    if data.shape != (grid.n**grid.dim, grid.dim):
        raise ValueError(f"{path}: expected {grid.n**grid.dim} rows of {grid.dim} values")
    u = data.T.reshape((grid.dim,) + grid.shape)
    return SimulationState(float(meta["time"]), u, float(meta["alpha"]), grid)
