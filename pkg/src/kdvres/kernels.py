"""O(M^2) double-sum kernels used by the slow Fourier-sum oracle.

These loops are the hot path of the oracle suite and carry numba ``@njit``
versions.  Setting the environment variable ``KDVRES_DISABLE_NUMBA=1``
before import selects the pure-numpy fallbacks instead; both paths are
exercised by the benchmark in ``benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import os

import numpy as np

NUMBA_ENABLED = os.environ.get("KDVRES_DISABLE_NUMBA", "") not in ("1", "true", "yes")

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False

__all__ = [
    "NUMBA_ENABLED",
    "convolve_square",
    "resonance_kernel",
    "direct_symplectic_sweep",
    "direct_explicit_step",
]


def _wrap_mode(m: int, M: int) -> int:
    """Wrap an integer mode into the retained set {-M/2+1, ..., M/2}."""
    half = M // 2
    while m > half:
        m -= M
    while m < -half + 1:
        m += M
    return m


def _convolve_square_py(w: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """Aliased self-convolution: out_m = sum_{a+b=m mod M} w_a w_b."""
    M = w.shape[0]
    half = M // 2
    out = np.zeros(M, dtype=np.complex128)
    for i in range(M):
        a = modes[i]
        if a == -half or w[i] == 0:
            continue
        for j in range(M):
            b = modes[j]
            if b == -half:
                continue
            m = a + b
            if m > half:
                m -= M
            elif m < -half + 1:
                m += M
            out[m % M] += w[i] * w[j]
    return out


def _direct_symplectic_sweep_py(
    y: np.ndarray, x: np.ndarray, modes: np.ndarray, tau: float
) -> np.ndarray:
    """One sweep of the implicit midpoint-averaged scheme in twisted form.

    Input vectors are twisted-variable coefficients (t_n = 0, so the step
    starts from the untwisted state); returns the updated candidate for the
    next twisted state.  The oscillatory kernel uses the exact phase
    m^3 - a^3 - b^3 with the wrapped output mode m, which equals 3*m*a*b
    on unaliased triples and matches the collocation product exactly.
    """
    M = x.shape[0]
    half = M // 2
    out = x.copy()
    for i in range(M):
        a = modes[i]
        if a == 0 or a == -half:
            continue
        sa = y[i] + x[i]
        if sa == 0:
            continue
        for j in range(M):
            b = modes[j]
            if b == 0 or b == -half:
                continue
            m = a + b
            if m > half:
                m -= M
            elif m < -half + 1:
                m += M
            if m == 0 or m == half:
                continue
            xi = float(m) ** 3 - float(a) ** 3 - float(b) ** 3
            kern = -(np.exp(-1j * tau * xi) - 1.0) / (24.0 * a * b)
            out[m % M] += kern * sa * (y[j] + x[j])
    return out


def _direct_explicit_step_py(
    x: np.ndarray, modes: np.ndarray, tau: float
) -> np.ndarray:
    """Frozen-coefficient (explicit) resonance step in twisted form."""
    M = x.shape[0]
    half = M // 2
    out = x.copy()
    for i in range(M):
        a = modes[i]
        if a == 0 or a == -half or x[i] == 0:
            continue
        for j in range(M):
            b = modes[j]
            if b == 0 or b == -half:
                continue
            m = a + b
            if m > half:
                m -= M
            elif m < -half + 1:
                m += M
            if m == 0 or m == half:
                continue
            xi = float(m) ** 3 - float(a) ** 3 - float(b) ** 3
            kern = -(np.exp(-1j * tau * xi) - 1.0) / (6.0 * a * b)
            out[m % M] += kern * x[i] * x[j]
    return out


if NUMBA_ENABLED:
    _convolve_square = njit(cache=True)(_convolve_square_py)
    _direct_symplectic_sweep = njit(cache=True)(_direct_symplectic_sweep_py)
    _direct_explicit_step = njit(cache=True)(_direct_explicit_step_py)
else:
    _convolve_square = _convolve_square_py
    _direct_symplectic_sweep = _direct_symplectic_sweep_py
    _direct_explicit_step = _direct_explicit_step_py


def convolve_square(w: np.ndarray, modes: np.ndarray) -> np.ndarray:
    return _convolve_square(
        np.ascontiguousarray(w, dtype=np.complex128),
        np.ascontiguousarray(modes, dtype=np.int64),
    )


def direct_symplectic_sweep(
    y: np.ndarray, x: np.ndarray, modes: np.ndarray, tau: float
) -> np.ndarray:
    return _direct_symplectic_sweep(
        np.ascontiguousarray(y, dtype=np.complex128),
        np.ascontiguousarray(x, dtype=np.complex128),
        np.ascontiguousarray(modes, dtype=np.int64),
        float(tau),
    )


def direct_explicit_step(x: np.ndarray, modes: np.ndarray, tau: float) -> np.ndarray:
    return _direct_explicit_step(
        np.ascontiguousarray(x, dtype=np.complex128),
        np.ascontiguousarray(modes, dtype=np.int64),
        float(tau),
    )


def resonance_kernel(m: int, a: int, b: int, tau: float) -> complex:
    """Exact oscillatory-integral kernel -(exp(-i tau 3mab) - 1)/(24ab).

    Valid for unaliased triples a + b = m; the small-tau limit is
    i*tau*m/8 + O(tau^2).
    """
    phase = 3.0 * m * a * b
    return complex(-(np.exp(-1j * tau * phase) - 1.0) / (24.0 * a * b))
