"""Generators for the two families of initial conditions.

Rough random data with a prescribed spectral decay exponent (seeded,
reproducible bit-for-bit via numpy's PCG64), and a smooth analytic
zero-mean profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, SpectralState
from .spectral import to_spectral

#: Exact mean of 1/(10*(2+sin x)) over the torus: integral is 2*pi/sqrt(3).
SMOOTH_PROFILE_MEAN = 1.0 / (10.0 * math.sqrt(3.0))


@dataclass(frozen=True)
class RoughDataSpec:
    """Seeded random data with coefficients ~ m^(-theta) * U/10."""

    M: int
    theta: float
    seed: int

    def __post_init__(self):
        if self.M < 4 or self.M % 2 != 0:
            raise ValueError("M must be even and >= 4")
        if self.theta <= 0.5:
            raise ValueError("theta must exceed 1/2 (data must stay in L^2)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


def random_rough(spec: RoughDataSpec) -> SpectralState:
    """Draw one sample of the rough random initial condition.

    For m = 1..M/2-1 the real and imaginary parts of U_m are independent
    uniform on [-1, 1]; c_m = m^(-theta) * U_m / 10, mirrored by complex
    conjugation onto negative modes so the field is real.
    """
    M = spec.M
    rng = np.random.default_rng(spec.seed)
    n_pos = M // 2 - 1
    draws = rng.uniform(-1.0, 1.0, size=(n_pos, 2))
    m = np.arange(1, M // 2)
    pos = (m.astype(np.float64) ** (-spec.theta)) * (
        draws[:, 0] + 1j * draws[:, 1]
    ) / 10.0
    coeffs = np.zeros(M, dtype=np.complex128)
    coeffs[1 : M // 2] = pos
    coeffs[M // 2 + 1 :] = np.conj(pos[::-1])
    return SpectralState(GridSpec(M), coeffs)


def smooth_profile(M: int) -> SpectralState:
    """Zero-mean smooth profile 1/(10(2+sin x)) minus its exact mean."""
    if M < 16 or M % 2 != 0:
        raise ValueError("M must be even and >= 16")
    grid = GridSpec(M)
    x = grid.nodes
    samples = 1.0 / (10.0 * (2.0 + np.sin(x))) - SMOOTH_PROFILE_MEAN
    return to_spectral(grid, samples)
