import numpy as np
import pytest

from kdvres.diagnostics import momentum
from kdvres.grid import GridSpec, SpectralState
from kdvres.initial_data import RoughDataSpec, random_rough, smooth_profile
from kdvres.integrators import (
    tangent_step,
    FixedPointDivergence,
    IntegratorConfig,
    Method,
    direct_explicit_resonance_step,
    direct_fourier_step,
    evolve,
    explicit_resonance_step,
    step_once,
    symmetric_lawson_step,
    symplectic_resonance_step,
)
from kdvres.spectral import (
    antiderivative,
    derivative,
    free_flow,
    pointwise_square,
)


def _state(M=32, seed=0, theta=3.5):
    return random_rough(RoughDataSpec(M=M, theta=theta, seed=seed))


def _l2(a, b):
    return float(np.sqrt(np.sum(np.abs(a.coeffs - b.coeffs) ** 2)))


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(tau=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(tau=0.1, fp_tol=-1.0)
    with pytest.raises(ValueError):
        IntegratorConfig(tau=0.1, fp_max_iters=0)
    assert IntegratorConfig(tau=0.1).tolerance == pytest.approx(1e-4)
    assert IntegratorConfig(tau=-0.1).tolerance == pytest.approx(1e-4)


def test_zero_state_is_fixed_point():
    z = SpectralState.zero(GridSpec(32))
    cfg = IntegratorConfig(tau=0.1)
    for step in (symplectic_resonance_step, symmetric_lawson_step):
        report = step(z, cfg)
        assert np.all(report.state.coeffs == 0)
        assert report.fp_iterations == 1
    assert np.all(explicit_resonance_step(z, cfg).coeffs == 0)


def test_single_mode_free_flow_only():
    # a single cosine has no self-interaction on the zero-mean projection
    # other than its second harmonic; check the linear phase is exact
    g = GridSpec(32)
    c = np.zeros(32, dtype=np.complex128)
    c[1], c[31] = 0.01, 0.01
    u = SpectralState(g, c)
    out = symplectic_resonance_step(u, IntegratorConfig(tau=0.2)).state
    assert np.isclose(out.mode(1), 0.01 * np.exp(1j * 0.2), atol=1e-5)


def test_oracle_equivalence_symplectic():
    for M in (16, 32):
        for tau in (0.1, 0.01):
            u = _state(M=M, seed=M)
            cfg = IntegratorConfig(tau=tau, fp_tol=1e-14)
            a = symplectic_resonance_step(u, cfg).state
            b = direct_fourier_step(u, cfg)
            assert _l2(a, b) < 1e-12


def test_oracle_equivalence_explicit():
    u = _state(M=32, seed=4)
    cfg = IntegratorConfig(tau=0.05)
    a = explicit_resonance_step(u, cfg)
    b = direct_explicit_resonance_step(u, cfg)
    assert _l2(a, b) < 1e-12


def test_oracle_gated_to_small_m():
    u = _state(M=256)
    with pytest.raises(ValueError):
        direct_fourier_step(u, IntegratorConfig(tau=0.1))
    with pytest.raises(ValueError):
        direct_fourier_step(_state(M=32), IntegratorConfig(tau=0.1, dealias=True))


def test_explicit_small_tau_limit():
    # (u1 - FF u0)/tau -> (1/2) d_x (u0^2), first-order Richardson behavior
    # (dealiased, so wrapped triples do not pollute the small-tau limit)
    u = _state(M=32, seed=2)
    target = derivative(pointwise_square(u, dealias=True)).scaled(0.5)
    errs = []
    for tau in (1e-3, 1e-4, 1e-5):
        out = explicit_resonance_step(u, IntegratorConfig(tau=tau, dealias=True))
        quotient = (out - free_flow(u, -tau)).scaled(1.0 / tau)
        errs.append(_l2(quotient, target))
    assert errs[0] / errs[1] == pytest.approx(10.0, rel=0.2)
    assert errs[1] / errs[2] == pytest.approx(10.0, rel=0.2)


def test_time_symmetry_symplectic_and_lawson():
    u = _state(M=64, seed=8)
    for step in (symplectic_resonance_step, symmetric_lawson_step):
        fwd = step(u, IntegratorConfig(tau=0.05, fp_tol=1e-12)).state
        back = step(fwd, IntegratorConfig(tau=-0.05, fp_tol=1e-12)).state
        assert _l2(back, u) < 4e-12


def test_step_preserves_state_invariants():
    u = _state(M=32, seed=1)
    for method in Method:
        out = step_once(u, method, IntegratorConfig(tau=0.02)).state
        assert out.coeffs[0] == 0.0
        assert out.coeffs[16] == 0.0
        neg = (-np.arange(32)) % 32
        assert np.allclose(out.coeffs, np.conj(out.coeffs[neg]), atol=0)


def test_momentum_exactly_conserved_by_symplectic_step():
    u = _state(M=64, seed=12)
    out = symplectic_resonance_step(u, IntegratorConfig(tau=0.05, fp_tol=1e-14))
    assert abs(momentum(out.state) - momentum(u)) < 1e-13


def test_fixed_point_contraction_in_tau():
    # halving tau at fixed tolerance cannot increase the iteration count
    u = _state(M=64, seed=3)
    counts = []
    for tau in (0.08, 0.04, 0.02, 0.01):
        counts.append(
            symplectic_resonance_step(
                u, IntegratorConfig(tau=tau, fp_tol=1e-12)
            ).fp_iterations
        )
    assert all(b <= a for a, b in zip(counts, counts[1:]))


def test_divergence_raises():
    u = _state(M=512, seed=5)
    with pytest.raises(FixedPointDivergence):
        symmetric_lawson_step(u, IntegratorConfig(tau=0.05, fp_tol=1e-14))


def test_lawson_second_order_on_smooth_data():
    u = smooth_profile(64)
    T = 1.0
    ref = evolve(u, Method.SYMMETRIC_LAWSON,
                 IntegratorConfig(tau=2.0**-12, fp_tol=1e-14), T).final_state
    errs = []
    taus = tuple(2.0**-k for k in range(6, 11))
    for tau in taus:
        out = evolve(u, Method.SYMMETRIC_LAWSON,
                     IntegratorConfig(tau=tau, fp_tol=1e-12), T).final_state
        errs.append(_l2(out, ref))
    slope = np.polyfit(np.log(taus), np.log(errs), 1)[0]
    assert 1.75 <= slope <= 2.25


def test_evolve_observers_and_stats():
    u = _state(M=32, seed=6)
    seen = []
    s = evolve(u, Method.SYMPLECTIC, IntegratorConfig(tau=0.05), 0.5,
               observers=[lambda n, t, st, rep: seen.append((n, t))])
    assert s.n_steps == 10
    assert len(seen) == 10
    assert seen[-1][0] == 10
    assert seen[-1][1] == pytest.approx(0.5)
    assert s.fp_iterations_total >= s.n_steps
    assert s.fp_iterations_max >= 1
    assert s.fp_iterations_mean == pytest.approx(s.fp_iterations_total / 10)


def test_evolve_divergence_carries_position():
    u = _state(M=512, seed=5)
    with pytest.raises(FixedPointDivergence) as info:
        evolve(u, Method.SYMMETRIC_LAWSON,
               IntegratorConfig(tau=0.05, fp_tol=1e-14), 1.0)
    assert info.value.step_index is not None
    assert info.value.time_reached is not None


def test_tangent_step_matches_finite_difference():
    u = _state(M=64, seed=1)
    v = _state(M=64, seed=2)
    cfg = IntegratorConfig(tau=0.05, fp_tol=1e-14)
    eps = 1e-7
    perturbed = SpectralState(u.grid, u.coeffs + eps * v.coeffs)
    fd = (symplectic_resonance_step(perturbed, cfg).state.coeffs
          - symplectic_resonance_step(u, cfg).state.coeffs) / eps
    tg = tangent_step(u, (v,), Method.SYMPLECTIC, cfg).tangents[0]
    assert np.max(np.abs(fd - tg.coeffs)) < 1e-8


def test_tangent_transport_conserves_pairing():
    from kdvres.diagnostics import symplectic_pairing

    u = _state(M=64, seed=1)
    v = _state(M=64, seed=2)
    w = _state(M=64, seed=3)
    cfg = IntegratorConfig(tau=0.05, fp_tol=1e-14)
    omega0 = symplectic_pairing(v, w)
    for _ in range(50):
        rep = tangent_step(u, (v, w), Method.SYMPLECTIC, cfg)
        u, (v, w) = rep.state, rep.tangents
    assert abs(symplectic_pairing(v, w) - omega0) < 1e-13


def test_explicit_tangent_transport_drifts():
    from kdvres.diagnostics import symplectic_pairing

    u = _state(M=64, seed=1)
    v = _state(M=64, seed=2)
    w = _state(M=64, seed=3)
    cfg = IntegratorConfig(tau=0.05)
    omega0 = symplectic_pairing(v, w)
    for _ in range(200):
        rep = tangent_step(u, (v, w), Method.EXPLICIT_RESONANCE, cfg)
        u, (v, w) = rep.state, rep.tangents
    assert abs(symplectic_pairing(v, w) - omega0) > 1e-10


def test_evolve_forward_backward_round_trip():
    u = _state(M=64, seed=10)
    fwd = evolve(u, Method.SYMPLECTIC,
                 IntegratorConfig(tau=0.05, fp_tol=1e-13), 1.0).final_state
    back = evolve(fwd, Method.SYMPLECTIC,
                  IntegratorConfig(tau=-0.05, fp_tol=1e-13), -1.0).final_state
    assert _l2(back, u) < 4e-11
