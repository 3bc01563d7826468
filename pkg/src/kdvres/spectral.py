"""Transforms, diagonal free-flow operators and spectral calculus.

Conventions: the forward transform carries the 1/M factor, i.e.
``coeffs = fft(samples) / M`` and ``samples = M * ifft(coeffs)``, so that
``u(x_j) = sum_m c_m exp(i m x_j)``.
"""

from __future__ import annotations

import numpy as np

from .grid import GridSpec, SpectralState, project_coeffs

#: Tolerance on the zero mode below which a field counts as zero-mean.
ZERO_MEAN_TOL = 1e-14


class InvariantViolation(ValueError):
    """A state failed a precondition on its invariants."""


def to_physical(state: SpectralState) -> np.ndarray:
    """Evaluate the field at the collocation points (real samples)."""
    return (state.grid.M * np.fft.ifft(state.coeffs)).real


def to_spectral(grid: GridSpec, samples: np.ndarray) -> SpectralState:
    """Transform M real samples to a projected spectral state."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (grid.M,):
        raise ValueError(
            f"expected {grid.M} samples, got shape {samples.shape}"
        )
    return SpectralState.from_coeffs(grid, np.fft.fft(samples) / grid.M)


def free_flow(state: SpectralState, t: float) -> SpectralState:
    """Diagonal linear flow: multiply mode m by exp(-i m^3 t).

    This is the operator exp(t d_x^3); the linear propagator of KdV over a
    step tau is ``free_flow(state, -tau)``.
    """
    m = state.grid.modes.astype(np.float64)
    phase = np.exp(-1j * (m**3) * t)
    return state.with_coeffs(phase * state.coeffs)


def derivative(state: SpectralState, order: int = 1) -> SpectralState:
    """Spectral derivative of the given positive integer order."""
    if order < 1:
        raise ValueError("order must be a positive integer")
    m = state.grid.modes.astype(np.float64)
    return state.with_coeffs(((1j * m) ** order) * state.coeffs)


def antiderivative(state: SpectralState) -> SpectralState:
    """Zero-mean antiderivative: mode m maps to c_m / (i m).

    Requires a zero mean; the zero mode of the result stays zero.
    """
    c = state.coeffs
    if abs(c[0]) > ZERO_MEAN_TOL:
        raise InvariantViolation(
            f"zero mode is {c[0]!r}, beyond tolerance {ZERO_MEAN_TOL}"
        )
    m = state.grid.modes.astype(np.float64)
    inv = np.zeros_like(c)
    nz = m != 0
    inv[nz] = c[nz] / (1j * m[nz])
    return state.with_coeffs(inv)


def _dealias_pad(coeffs: np.ndarray, M: int, K: int) -> np.ndarray:
    """Embed retained modes of an M-grid spectrum into a K-grid spectrum."""
    padded = np.zeros(K, dtype=np.complex128)
    half = M // 2
    padded[: half + 1] = coeffs[: half + 1]
    padded[K - half + 1 :] = coeffs[half + 1 :]
    return padded


def pointwise_square(state: SpectralState, dealias: bool = False) -> SpectralState:
    """Spectrum of the squared field.

    With ``dealias=False`` the square is taken on the M-point collocation
    grid, reproducing the aliased discrete convolution (wrapped modes
    l in {-1, 0, 1}).  With ``dealias=True`` the square is computed on a
    zero-padded 2M-point grid so no aliased term survives truncation.
    The result is projected (zero mean, zero Nyquist).
    """
    M = state.grid.M
    if dealias:
        K = 2 * M
        padded = _dealias_pad(state.coeffs, M, K)
        samples = (K * np.fft.ifft(padded)).real
        sq = np.fft.fft(samples * samples) / K
        half = M // 2
        out = np.concatenate([sq[: half + 1], sq[K - half + 1 :]])
    else:
        samples = (M * np.fft.ifft(state.coeffs)).real
        out = np.fft.fft(samples * samples) / M
    return SpectralState(state.grid, project_coeffs(out, M))


def sobolev_norm(state: SpectralState, s: float) -> float:
    """Sobolev seminorm (sum over m != 0 of |m|^{2s} |c_m|^2)^(1/2)."""
    if s < 0:
        raise ValueError("Sobolev index must be non-negative")
    m = state.grid.modes.astype(np.float64)
    nz = m != 0
    weights = np.abs(m[nz]) ** (2.0 * s)
    return float(np.sqrt(np.sum(weights * np.abs(state.coeffs[nz]) ** 2)))
