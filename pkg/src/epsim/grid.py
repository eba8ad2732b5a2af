"""Periodic tensor-product grid and the Fourier-space operators built on it.

Fields are plain numpy arrays whose trailing ``dim`` axes are the spatial
axes, so a scalar field has shape ``(n,) * dim`` and a vector field has shape
``(dim,) + (n,) * dim``. All transforms act on the trailing axes only, which
lets every operator below work on scalars, vectors and tensors alike.

The grid spans ``[-L/2, L/2)`` so that index ``n // 2`` is the point
``x = 0``, the fixed point of the reflection ``x -> -x``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

# Worker threads handed to scipy.fft; set from the CLI ``--threads`` flag.
FFT_WORKERS: int | None = None

_MEAN = np.iinfo(np.int64).min


@dataclass(frozen=True)
class Grid:
    dim: int
    n: int
    length: float = 2 * np.pi

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError(f"points per axis must be a power of two >= 8, got {self.n}")
        if not self.length > 0:
            raise ValueError(f"domain length must be positive, got {self.length}")

    # -- geometry -----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def volume(self) -> float:
        return self.length**self.dim

    @property
    def axes(self) -> tuple[int, ...]:
        return tuple(range(-self.dim, 0))

    @cached_property
    def x(self) -> np.ndarray:
        """1D coordinate table, shared by every axis."""
        return -self.length / 2 + self.spacing * np.arange(self.n)

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.x] * self.dim), indexing="ij"))

    @property
    def origin_index(self) -> tuple[int, ...]:
        return (self.n // 2,) * self.dim

    # -- spectral tables ----------------------------------------------------
    # Real transforms: the last spatial axis holds only n//2 + 1 modes.

    @cached_property
    def mode_numbers(self) -> tuple[np.ndarray, ...]:
        full = np.fft.fftfreq(self.n, 1.0 / self.n)
        half = np.fft.rfftfreq(self.n, 1.0 / self.n)
        tables = [full] * (self.dim - 1) + [half]
        return tuple(np.meshgrid(*tables, indexing="ij"))

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        return tuple(2 * np.pi / self.length * nj for nj in self.mode_numbers)

    @cached_property
    def k_squared(self) -> np.ndarray:
        return sum(kj**2 for kj in self.wavenumbers)

    @cached_property
    def k_magnitude(self) -> np.ndarray:
        return np.sqrt(self.k_squared)

    @cached_property
    def _ik(self) -> tuple[np.ndarray, ...]:
        out = []
        for nj, kj in zip(self.mode_numbers, self.wavenumbers):
            out.append(np.where(np.abs(nj) == self.n // 2, 0.0, 1j * kj))
        return tuple(out)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        keep = np.ones(self.mode_numbers[0].shape, dtype=bool)
        for nj in self.mode_numbers:
            keep &= np.abs(nj) <= self.n / 3
        return keep

    def k_max(self, dealiased: bool = True) -> float:
        """Largest resolved wavenumber per axis, used by the CFL estimate."""
        kmax = np.pi / self.length * self.n
        return kmax * 2 / 3 if dealiased else kmax

    # -- transforms ---------------------------------------------------------

    def fft(self, f: np.ndarray) -> np.ndarray:
        return sfft.rfftn(f, axes=self.axes, workers=FFT_WORKERS)

    def ifft(self, fh: np.ndarray) -> np.ndarray:
        return sfft.irfftn(fh, s=self.shape, axes=self.axes, workers=FFT_WORKERS)

    def _multiply(self, f: np.ndarray, symbol: np.ndarray) -> np.ndarray:
        return self.ifft(self.fft(f) * symbol)

    # -- operators ----------------------------------------------------------

    def partial_derivative(self, f: np.ndarray, axis: int) -> np.ndarray:
        """Spectral d/dx_axis with the Nyquist mode dropped."""
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} out of range for a {self.dim}D grid")
        return self._multiply(f, self._ik[axis])

    def gradient(self, f: np.ndarray) -> np.ndarray:
        """Stack of partial derivatives along a new axis placed just before the spatial axes."""
        fh = self.fft(f)
        return np.stack([self.ifft(fh * ik) for ik in self._ik], axis=-self.dim - 1)

    def divergence(self, v: np.ndarray) -> np.ndarray:
        """Contract the axis just before the spatial axes with the gradient."""
        vh = self.fft(v)
        lead = vh.ndim - self.dim - 1
        total = sum(np.take(vh, j, axis=lead) * self._ik[j] for j in range(self.dim))
        return self.ifft(total)

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        return self._multiply(f, -self.k_squared)

    def helmholtz_apply(self, f: np.ndarray, alpha: float) -> np.ndarray:
        _check_alpha(alpha)
        if alpha == 0:
            return np.array(f, dtype=float, copy=True)
        return self._multiply(f, 1.0 + alpha * self.k_squared)

    def helmholtz_invert(self, f: np.ndarray, alpha: float) -> np.ndarray:
        _check_alpha(alpha)
        if alpha == 0:
            return np.array(f, dtype=float, copy=True)
        return self._multiply(f, 1.0 / (1.0 + alpha * self.k_squared))

    def dealias(self, f: np.ndarray) -> np.ndarray:
        return self._multiply(f, self.dealias_mask)

    @cached_property
    def shell_index(self) -> np.ndarray:
        """Dyadic shell label m of every mode (2**(m-1) <= |k| < 2**m); _MEAN for k = 0."""
        _, exponent = np.frexp(self.k_magnitude)
        return np.where(self.k_magnitude > 0, exponent.astype(np.int64), _MEAN)

    def nonempty_shells(self) -> list[int]:
        m = self.shell_index
        return [int(v) for v in np.unique(m[m != _MEAN])]

    def shell_filter(self, f: np.ndarray, m: int) -> np.ndarray:
        """Sharp dyadic band-pass keeping 2**(m-1) <= |k| < 2**m."""
        return self._multiply(f, self.shell_index == m)

    def mean_mode(self, f: np.ndarray) -> np.ndarray:
        return np.broadcast_to(
            f.mean(axis=self.axes, keepdims=True), f.shape
        ).copy()

    # -- quadrature ---------------------------------------------------------

    def integrate(self, f: np.ndarray) -> np.ndarray | float:
        """Torus integral: mean times volume (exact for band-limited integrands)."""
        return f.mean(axis=self.axes) * self.volume

    def l2_norm(self, f: np.ndarray) -> float:
        """L2 norm summed over any leading component axes."""
        return float(np.sqrt(np.sum(f**2) / np.prod(self.shape) * self.volume))

    def l2_norm_spectral(self, f: np.ndarray) -> float:
        """Same norm evaluated through Parseval on the real-FFT half spectrum."""
        fh = self.fft(f)
        weight = np.full(self.mode_numbers[-1].shape, 2.0)
        nlast = self.mode_numbers[-1]
        weight[(nlast == 0) | (nlast == self.n // 2)] = 1.0
        total = np.sum(weight * np.abs(fh) ** 2)
        npts = float(np.prod(self.shape))
        return float(np.sqrt(total / npts**2 * self.volume))

    # -- symmetry -----------------------------------------------------------

    def reflect(self, f: np.ndarray) -> np.ndarray:
        """Sample f at -x. Index j maps to (n - j) mod n on every spatial axis."""
        out = np.flip(f, axis=self.axes)
        return np.roll(out, 1, axis=self.axes)

    # -- helpers for tests and initial data ----------------------------------

    def random_band_limited(
        self, rng: np.random.Generator, ncomp: int | None = None, band: int | None = None
    ) -> np.ndarray:
        """Random real field with every mode inside the dealias mask (or |n| <= band)."""
        shape = self.shape if ncomp is None else (ncomp,) + self.shape
        f = rng.standard_normal(shape)
        keep = self.dealias_mask.copy()
        if band is not None:
            for nj in self.mode_numbers:
                keep &= np.abs(nj) <= band
        return self._multiply(f, keep)


def _check_alpha(alpha: float) -> None:
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
