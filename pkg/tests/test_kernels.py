import numpy as np

from kdvres import kernels
from kdvres.grid import GridSpec
from kdvres.initial_data import RoughDataSpec, random_rough
from kdvres.spectral import pointwise_square


def _state(M=16, seed=3):
    return random_rough(RoughDataSpec(M=M, theta=2.5, seed=seed))


def test_convolve_square_matches_fft_product():
    for M in (8, 16, 32):
        u = _state(M=M)
        direct = kernels.convolve_square(u.coeffs, GridSpec(M).modes)
        fft = pointwise_square(u, dealias=False)
        # the direct sum has no projection; compare away from mean/Nyquist
        mask = np.ones(M, dtype=bool)
        mask[0] = mask[M // 2] = False
        assert np.allclose(direct[mask], fft.coeffs[mask] * 1.0, atol=1e-14)


def test_resonance_kernel_small_tau_limit():
    # kernel -> i*tau*m/8 as tau -> 0; relative 1e-5 at tau = 1e-6
    m, a, b = 3, 1, 2
    tau = 1e-6
    k = kernels.resonance_kernel(m, a, b, tau)
    limit = 1j * tau * m / 8.0
    assert abs(k - limit) <= 1e-5 * abs(limit)


def test_resonance_kernel_exact_integral():
    # the kernel is (im/8) * integral_0^tau exp(-i s 3mab) ds
    m, a, b, tau = 5, 2, 3, 0.37
    phase = 3.0 * m * a * b
    integral = (1.0 - np.exp(-1j * tau * phase)) / (1j * phase)
    expected = (1j * m / 8.0) * integral
    assert np.isclose(kernels.resonance_kernel(m, a, b, tau), expected)


def test_sweep_kernel_phase_on_unaliased_triples():
    # xi = m^3 - a^3 - b^3 equals 3mab when a + b = m exactly
    for m, a in ((3, 1), (5, 2), (7, 3)):
        b = m - a
        xi = m**3 - a**3 - b**3
        assert xi == 3 * m * a * b


def test_python_and_dispatch_paths_agree():
    u = _state(M=16)
    modes = GridSpec(16).modes
    tau = 0.05
    for fast, slow, args in (
        (kernels.convolve_square, kernels._convolve_square_py,
         (u.coeffs, modes)),
        (kernels.direct_symplectic_sweep, kernels._direct_symplectic_sweep_py,
         (u.coeffs, u.coeffs, modes, tau)),
        (kernels.direct_explicit_step, kernels._direct_explicit_step_py,
         (u.coeffs, modes, tau)),
    ):
        a = fast(*args)
        b = slow(np.ascontiguousarray(args[0]), *args[1:])
        assert np.allclose(a, b, atol=1e-15)


def test_sweep_output_zero_for_zero_input():
    modes = GridSpec(16).modes
    z = np.zeros(16, dtype=np.complex128)
    out = kernels.direct_symplectic_sweep(z, z, modes, 0.1)
    assert np.all(out == 0)
