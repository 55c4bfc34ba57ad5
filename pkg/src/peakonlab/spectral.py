"""Uniform period-1 grids and Fourier helpers (real FFT layout)."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import BadGrid

TWO_PI = 2.0 * np.pi


def _check_n(n: int, minimum: int = 8):
    if n < minimum or n & (n - 1):
        raise BadGrid(f"N must be a power of two >= {minimum}, got {n}")


@dataclass(frozen=True)
class Grid:
    N: int

    def __post_init__(self):
        _check_n(self.N)

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.N) / self.N

    @cached_property
    def n(self) -> np.ndarray:
        """Nonnegative integer modes of the rfft layout, 0..N/2."""
        return np.arange(self.N // 2 + 1)

    @cached_property
    def k(self) -> np.ndarray:
        return TWO_PI * self.n

    @cached_property
    def ik(self) -> np.ndarray:
        # Nyquist derivative is zeroed to keep d/dx real and skew-adjoint
        ik = 1j * self.k
        ik[-1] = 0.0
        return ik

    @cached_property
    def helmholtz(self) -> np.ndarray:
        """Multiplier 1 + (2 pi n)^2 of (1 - d^2/dx^2)."""
        return 1.0 + self.k**2

    @cached_property
    def weights(self) -> np.ndarray:
        """Multiplicity of each rfft mode in a full two-sided sum."""
        w = np.full(self.N // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        return w

    def truncation(self, nmax: float) -> np.ndarray:
        return (self.n <= nmax).astype(float)


@lru_cache(maxsize=16)
def grid_for(n: int) -> Grid:
    return Grid(n)


@dataclass(frozen=True)
class GridState:
    """Samples of u at ``time`` on the uniform grid x_j = j/N."""

    time: float
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if u.ndim != 1:
            raise BadGrid("u must be one-dimensional")
        _check_n(u.size)
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "time", float(self.time))

    @classmethod
    def from_samples(cls, x, u, time: float = 0.0) -> GridState:
        x = np.asarray(x, dtype=float)
        n = x.size
        _check_n(n)
        if not np.allclose(x, np.arange(n) / n, rtol=0.0, atol=1e-12):
            raise BadGrid("samples must sit on x_j = j/N over one period")
        return cls(time, u)

    @property
    def N(self) -> int:
        return self.u.size

    @property
    def grid(self) -> Grid:
        return grid_for(self.N)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @cached_property
    def u_hat(self) -> np.ndarray:
        """Fourier coefficients u(x) = sum_n u_hat(n) e^{2 pi i n x}, modes 0..N/2."""
        return np.fft.rfft(self.u) / self.N

    @cached_property
    def m(self) -> np.ndarray:
        return np.fft.irfft(self.u_hat * self.grid.helmholtz * self.N, self.N)

    @cached_property
    def ux(self) -> np.ndarray:
        return np.fft.irfft(self.u_hat * self.grid.ik * self.N, self.N)

    def replace(self, time: float, u) -> GridState:
        return GridState(time, u)


def derivative(u: np.ndarray) -> np.ndarray:
    g = grid_for(u.size)
    return np.fft.irfft(np.fft.rfft(u) * g.ik, u.size)


def fourier_shift(u: np.ndarray, shift: float) -> np.ndarray:
    """Band-limited translate v(x) = u(x - shift)."""
    g = grid_for(u.size)
    uh = np.fft.rfft(u) * np.exp(-1j * g.k * shift)
    uh[-1] = uh[-1].real  # Nyquist mode is ambiguous under sub-grid shifts
    return np.fft.irfft(uh, u.size)
