"""Conserved-quantity functionals and error metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import SpectralState
from .spectral import sobolev_norm


def momentum(u: SpectralState) -> float:
    """Integral of u^2 over the torus: 2*pi * sum_m |c_m|^2."""
    return float(2.0 * np.pi * np.sum(np.abs(u.coeffs) ** 2))


def hamiltonian(u: SpectralState, dealias: bool = True) -> float:
    """First integral -(1/2) * integral of (3 u_x^2 + u^3).

    The quadratic part is evaluated by Parseval; the cubic integral uses
    collocation quadrature on a 2M-point grid by default (exact for the
    truncated field), or the M-point grid when ``dealias=False``.
    """
    M = u.grid.M
    m = u.grid.modes.astype(np.float64)
    quad = -3.0 * np.pi * float(np.sum((m**2) * np.abs(u.coeffs) ** 2))
    K = 2 * M if dealias else M
    if dealias:
        half = M // 2
        padded = np.zeros(K, dtype=np.complex128)
        padded[: half + 1] = u.coeffs[: half + 1]
        padded[K - half + 1 :] = u.coeffs[half + 1 :]
        samples = (K * np.fft.ifft(padded)).real
    else:
        samples = (M * np.fft.ifft(u.coeffs)).real
    cubic = (2.0 * np.pi / K) * float(np.sum(samples**3))
    return quad - 0.5 * cubic


def symplectic_pairing(u: SpectralState, w: SpectralState) -> complex:
    """Symplectic two-form of the KdV flow on two tangent vectors.

    KdV is Hamiltonian for the first-derivative Poisson operator, whose
    inverse weights the Fourier pairing by 1/(im):

        omega(u, w) = sum_{m != 0} u_m w_{-m} / (i m).

    The form is antisymmetric, and it is this pairing that the implicit
    midpoint-type schemes transport invariantly along the linearized flow.
    The free flow leaves it unchanged, so it reads the same in twisted and
    untwisted variables.
    """
    if u.grid != w.grid:
        raise ValueError("grid mismatch")
    M = u.grid.M
    m = u.grid.modes.astype(np.float64)
    neg = (-np.arange(M)) % M
    weight = np.zeros(M, dtype=np.complex128)
    nz = m != 0
    weight[nz] = 1.0 / (1j * m[nz])
    return complex(np.sum(weight * u.coeffs * w.coeffs[neg]))


def h_error(u: SpectralState, ref: SpectralState, s: float) -> float:
    """Sobolev-norm distance between a state and a reference state."""
    if u.grid != ref.grid:
        raise ValueError("grid mismatch")
    return sobolev_norm(u - ref, s)


#: Column order of a serialized diagnostics row.
DIAGNOSTICS_COLUMNS = (
    "step_index",
    "time",
    "momentum",
    "hamiltonian",
    "h1_error_vs_ref",
    "fp_iterations",
    "wall_time_s",
)


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-step sample of the conserved quantities and solver effort."""

    step_index: int
    time: float
    momentum: float
    hamiltonian: float
    h1_error_vs_ref: Optional[float] = None
    fp_iterations: Optional[int] = None
    wall_time_s: float = 0.0

    def to_row(self) -> list[str]:
        def fmt(x) -> str:
            if x is None:
                return ""
            if isinstance(x, int):
                return str(x)
            return f"{x:.17g}"

        return [
            fmt(self.step_index),
            fmt(self.time),
            fmt(self.momentum),
            fmt(self.hamiltonian),
            fmt(self.h1_error_vs_ref),
            fmt(self.fp_iterations),
            fmt(self.wall_time_s),
        ]
