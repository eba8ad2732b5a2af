"""Initial velocity fields."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import reflect_symmetrize
from .grid import Grid

KINDS = ("gradient_cosine", "odd_random", "peakon", "gaussian_shear")


@dataclass(frozen=True)
class InitialData:
    kind: str = "gaussian_shear"
    amplitude: float = 0.5
    sigma: float = 0.5
    seed: int = 0
    band: int = 4
    speed: float = 1.0
    smoothing: float = 0.05

    def validate(self) -> list[str]:
        errs = []
        if self.kind not in KINDS:
            errs.append(f"initial_data.kind must be one of {', '.join(KINDS)}, got {self.kind!r}")
        if self.amplitude < 0:
            errs.append("initial_data.amplitude must be >= 0")
        if not self.sigma > 0:
            errs.append("initial_data.sigma must be > 0")
        if self.seed < 0:
            errs.append("initial_data.seed must be >= 0")
        if self.band < 1:
            errs.append("initial_data.band must be >= 1")
        if self.speed < 0:
            errs.append("initial_data.speed must be >= 0")
        if not self.smoothing > 0:
            errs.append("initial_data.smoothing must be > 0")
        return errs


def gradient_cosine(grid: Grid, amplitude: float) -> np.ndarray:
    """u0 = grad(A cos(k x1) cos(k x2)) / k with k = 2 pi / L.

    Odd under x -> -x; div u0(0) = -dim * A * k (-2A on the 2 pi torus in 2D).
    """
    kappa = 2 * np.pi / grid.length
    X = grid.coords
    if grid.dim == 1:
        return np.stack([-amplitude * np.sin(kappa * X[0])])
    return np.stack(
        [
            -amplitude * np.sin(kappa * X[0]) * np.cos(kappa * X[1]),
            -amplitude * np.cos(kappa * X[0]) * np.sin(kappa * X[1]),
        ]
    )


def gradient_cosine_divergence(grid: Grid, amplitude: float) -> float:
    return -grid.dim * amplitude * 2 * np.pi / grid.length


def odd_random(grid: Grid, amplitude: float, seed: int, band: int) -> np.ndarray:
    """Random reflection-odd field with modes |n| <= band, scaled to max|u| = amplitude."""
    rng = np.random.default_rng(seed)
    u = grid.random_band_limited(rng, grid.dim, band=band)
    u = reflect_symmetrize(grid, u)
    peak = np.max(np.abs(u))
    return u * (amplitude / peak) if peak > 0 else u


def peakon(grid: Grid, speed: float, alpha: float, smoothing: float) -> np.ndarray:
    """c exp(-|x| / sqrt(alpha)) convolved with a unit Gaussian of width ``smoothing``."""
    if grid.dim != 1:
        raise ValueError("peakon data is one-dimensional")
    if not alpha > 0:
        raise ValueError("peakon width sqrt(alpha) needs alpha > 0")
    x = grid.coords[0]
    raw = speed * np.exp(-np.abs(x) / np.sqrt(alpha))
    mollifier = np.exp(-0.5 * grid.k_squared * smoothing**2)
    return grid.ifft(grid.fft(raw) * mollifier)[None]


def gaussian_shear(grid: Grid, amplitude: float, sigma: float) -> np.ndarray:
    """Crossed Gaussian jets: u1 = A g(x2), u2 = (A/2) g(x1) with g(s) = exp(-s^2 / 2 sigma^2)."""
    X = grid.coords
    g = lambda s: np.exp(-(s**2) / (2 * sigma**2))  # noqa: E731
    if grid.dim == 1:
        return np.stack([amplitude * g(X[0])])
    return np.stack([amplitude * g(X[1]), 0.5 * amplitude * g(X[0])])


def build(grid: Grid, data: InitialData, alpha: float, dealias: bool = True) -> np.ndarray:
    if data.kind == "gradient_cosine":
        u = gradient_cosine(grid, data.amplitude)
    elif data.kind == "odd_random":
        u = odd_random(grid, data.amplitude, data.seed, data.band)
    elif data.kind == "peakon":
        u = peakon(grid, data.speed, alpha, data.smoothing)
    elif data.kind == "gaussian_shear":
        u = gaussian_shear(grid, data.amplitude, data.sigma)
    else:
        raise ValueError(f"unknown initial data kind {data.kind!r}")
    return grid.dealias(u) if dealias else u
