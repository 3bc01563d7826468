"""Spectral solvers for the periodic KdV equation with a symplectic
resonance-based implicit integrator, comparison integrators, and
conserved-quantity diagnostics."""

__version__ = "0.1.0"

#: Identifier of the seeded generator used for rough initial data.
PRNG_ID = "numpy-PCG64"

from .grid import GridSpec, SpectralState
from .spectral import (
    antiderivative,
    derivative,
    free_flow,
    pointwise_square,
    sobolev_norm,
    to_physical,
    to_spectral,
)
from .initial_data import RoughDataSpec, random_rough, smooth_profile
from .integrators import (
    FixedPointDivergence,
    IntegratorConfig,
    Method,
    StepReport,
    TangentStepReport,
    direct_fourier_step,
    evolve,
    explicit_resonance_step,
    symmetric_lawson_step,
    symplectic_resonance_step,
    tangent_step,
)
from .diagnostics import (
    DiagnosticsRecord,
    h_error,
    hamiltonian,
    momentum,
    symplectic_pairing,
)

__all__ = [
    "GridSpec",
    "SpectralState",
    "to_physical",
    "to_spectral",
    "free_flow",
    "derivative",
    "antiderivative",
    "pointwise_square",
    "sobolev_norm",
    "RoughDataSpec",
    "random_rough",
    "smooth_profile",
    "IntegratorConfig",
    "StepReport",
    "Method",
    "FixedPointDivergence",
    "symplectic_resonance_step",
    "tangent_step",
    "TangentStepReport",
    "explicit_resonance_step",
    "symmetric_lawson_step",
    "direct_fourier_step",
    "evolve",
    "momentum",
    "hamiltonian",
    "symplectic_pairing",
    "h_error",
    "DiagnosticsRecord",
    "PRNG_ID",
]
