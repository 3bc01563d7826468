"""Fourier grid and the spectral state representation.

A state is a vector of Fourier coefficients of a real, zero-mean periodic
field on the torus [-pi, pi).  Coefficients are stored in numpy FFT order
(index k holds mode m = k for k <= M/2 and m = k - M for k > M/2).  Three
invariants are enforced on construction:

* the zero mode vanishes (zero-mass field),
* the Nyquist mode m = M/2 vanishes (it has no Hermitian partner in the
  retained index set {-M/2+1, ..., M/2}),
* Hermitian symmetry u_{-m} = conj(u_m), so the physical field is real.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Uniform collocation grid with M Fourier modes on [-pi, pi)."""

    M: int

    def __post_init__(self):
        if self.M < 4 or self.M % 2 != 0:
            raise ValueError(f"M must be even and >= 4, got {self.M}")

    @property
    def modes(self) -> np.ndarray:
        """Integer mode numbers in FFT storage order."""
        return np.fft.fftfreq(self.M, d=1.0 / self.M).astype(np.int64)

    @property
    def nodes(self) -> np.ndarray:
        """Collocation points x_j = 2*pi*j/M (a full period of the torus)."""
        return 2.0 * np.pi * np.arange(self.M) / self.M

    @property
    def nyquist_index(self) -> int:
        return self.M // 2


def project_coeffs(coeffs: np.ndarray, M: int) -> np.ndarray:
    """Return a copy of ``coeffs`` with the state invariants enforced.

    Zeroes the mean and Nyquist modes and symmetrizes Hermitian pairs.
    """
    c = np.asarray(coeffs, dtype=np.complex128).copy()
    if c.shape != (M,):
        raise ValueError(f"expected {M} coefficients, got shape {c.shape}")
    c[0] = 0.0
    c[M // 2] = 0.0
    neg = (-np.arange(M)) % M
    c = 0.5 * (c + np.conj(c[neg]))
    c[0] = 0.0
    c[M // 2] = 0.0
    return c


@dataclass(frozen=True)
class SpectralState:
    """Immutable Fourier-coefficient vector on a :class:`GridSpec`."""

    grid: GridSpec
    coeffs: np.ndarray = field(repr=False)

    @classmethod
    def from_coeffs(cls, grid: GridSpec, coeffs: np.ndarray) -> "SpectralState":
        """Build a state, projecting onto the invariant-satisfying subspace."""
        return cls(grid, project_coeffs(coeffs, grid.M))

    @classmethod
    def zero(cls, grid: GridSpec) -> "SpectralState":
        return cls(grid, np.zeros(grid.M, dtype=np.complex128))

    def __post_init__(self):
        if self.coeffs.shape != (self.grid.M,):
            raise ValueError(
                f"coefficient vector has shape {self.coeffs.shape}, "
                f"expected ({self.grid.M},)"
            )
        self.coeffs.setflags(write=False)

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralState":
        """New state on the same grid (no projection applied)."""
        return SpectralState(self.grid, np.asarray(coeffs, dtype=np.complex128))

    def mode(self, m: int) -> complex:
        """Coefficient of mode m (m in the retained index set)."""
        M = self.grid.M
        if not -M // 2 + 1 <= m <= M // 2:
            raise ValueError(f"mode {m} outside retained set for M={M}")
        return complex(self.coeffs[m % M])

    def __sub__(self, other: "SpectralState") -> "SpectralState":
        if self.grid != other.grid:
            raise ValueError("grid mismatch")
        return SpectralState(self.grid, self.coeffs - other.coeffs)

    def __add__(self, other: "SpectralState") -> "SpectralState":
        if self.grid != other.grid:
            raise ValueError("grid mismatch")
        return SpectralState(self.grid, self.coeffs + other.coeffs)

    def scaled(self, factor: complex) -> "SpectralState":
        return SpectralState(self.grid, factor * self.coeffs)
