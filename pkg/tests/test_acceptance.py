"""End-to-end acceptance checks for the solver suite.

Each test covers one headline property and prints a single PASS/FAIL
line with the measured value and its tolerance.  Expensive runs
(long-time conservation, convergence studies, the resonance sweep) are
shared across criteria through module-scoped fixtures.
"""

import time

import numpy as np
import pytest

from kdvres.grid import SpectralState
from kdvres.harness import ExperimentConfig, run_experiment
from kdvres.initial_data import RoughDataSpec, random_rough
from kdvres.integrators import (
    IntegratorConfig,
    direct_explicit_resonance_step,
    direct_fourier_step,
    explicit_resonance_step,
    symmetric_lawson_step,
    symplectic_resonance_step,
)

TAU_GRID = [2.0**-k for k in range(4, 11)]


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _l2(a: SpectralState, b: SpectralState) -> float:
    return float(np.sqrt(np.sum(np.abs(a.coeffs - b.coeffs) ** 2)))


def _converge_config(theta: float, methods) -> ExperimentConfig:
    return ExperimentConfig.from_dict({
        "kind": "converge",
        "M": 512,
        "data": {"type": "rough", "theta": theta, "seed": 11},
        "methods": methods,
        "tau_grid": TAU_GRID,
        "T": 1.0,
        "ref_tau": 2.0**-15,
    })


@pytest.fixture(scope="module")
def convergence_smooth_spectrum():
    return run_experiment(_converge_config(5.5, ["symplectic"]))


@pytest.fixture(scope="module")
def convergence_rough_spectrum():
    return run_experiment(_converge_config(3.5, ["symplectic", "explicit"]))


@pytest.fixture(scope="module")
def conservation_run():
    cfg = ExperimentConfig.from_dict({
        "kind": "conserve",
        "M": 512,
        "data": {"type": "rough", "theta": 3.5, "seed": 11},
        "methods": ["symplectic", "explicit", "lawson"],
        "tau_grid": [0.05],
        "T": 500.0,
        "stride": 100,
    })
    return run_experiment(cfg)


@pytest.fixture(scope="module")
def sweep_run():
    grid = sorted(
        set(np.geomspace(0.01, 0.1, 100)) | set(np.linspace(0.055, 0.065, 100))
    )
    cfg = ExperimentConfig.from_dict({
        "kind": "sweep",
        "M": 256,
        "data": {"type": "rough", "theta": 3.5, "seed": 11},
        "tau_grid": grid,
        "T": 100.0,
    })
    start = time.perf_counter()
    result = run_experiment(cfg)
    return result, time.perf_counter() - start


def test_oracle_equivalence_symplectic_step():
    start = time.perf_counter()
    worst = 0.0
    for M in (16, 32, 64):
        for tau in (0.1, 0.01):
            for seed in range(20):
                u = random_rough(RoughDataSpec(M=M, theta=3.5, seed=seed))
                cfg = IntegratorConfig(tau=tau, fp_tol=1e-14)
                fast = symplectic_resonance_step(u, cfg).state
                slow = direct_fourier_step(u, cfg)
                worst = max(worst, _l2(fast, slow))
    elapsed = time.perf_counter() - start
    _report(
        "oracle equivalence (symplectic)",
        worst < 1e-11 and elapsed < 30.0,
        f"max L2 gap {worst:.3e} (tol 1e-11), {elapsed:.1f}s (limit 30s)",
    )


def test_oracle_equivalence_explicit_step():
    worst = 0.0
    for M in (16, 32, 64):
        for tau in (0.1, 0.01):
            for seed in range(20):
                u = random_rough(RoughDataSpec(M=M, theta=3.5, seed=seed))
                cfg = IntegratorConfig(tau=tau)
                fast = explicit_resonance_step(u, cfg)
                slow = direct_explicit_resonance_step(u, cfg)
                worst = max(worst, _l2(fast, slow))
    _report(
        "oracle equivalence (explicit)",
        worst < 1e-11,
        f"max L2 gap {worst:.3e} (tol 1e-11)",
    )


def test_second_order_convergence_smooth_spectrum(convergence_smooth_spectrum):
    slope = convergence_smooth_spectrum.summary["slopes"]["symplectic"]
    _report(
        "second-order convergence (theta=5.5)",
        1.75 <= slope <= 2.25,
        f"H1 slope {slope:.4f} (window [1.75, 2.25])",
    )


def test_first_order_floor_rough_spectrum(convergence_rough_spectrum):
    slope = convergence_rough_spectrum.summary["slopes"]["symplectic"]
    _report(
        "rough-data convergence floor (theta=3.5)",
        slope >= 0.9,
        f"H1 slope {slope:.4f} (floor 0.9; observed superlinear)",
    )


def test_explicit_comparator_slope(convergence_rough_spectrum):
    slope = convergence_rough_spectrum.summary["slopes"]["explicit"]
    _report(
        "explicit comparator order (theta=3.5)",
        0.75 <= slope <= 1.25,
        f"H1 slope {slope:.4f} (window [0.75, 1.25])",
    )


def test_momentum_conservation_long_time(conservation_run):
    drift = conservation_run.summary["methods"]["symplectic"]["max_momentum_err"]
    _report(
        "momentum conservation (T=500, tau=0.05)",
        drift < 1e-10,
        f"max |I0 drift| {drift:.3e} (tol 1e-10)",
    )


def test_fixed_point_iteration_counts(conservation_run):
    stats = conservation_run.summary["methods"]["symplectic"]
    mean, worst = stats["fp_iter_mean"], stats["fp_iter_max"]
    _report(
        "fixed-point iteration budget (tau=0.05, M=512)",
        5.0 <= mean <= 25.0 and worst <= 30,
        f"mean {mean:.2f} (window [5, 25]), max {worst} (limit 30)",
    )


def test_lawson_comparator_instability(conservation_run):
    methods = conservation_run.summary["methods"]
    lawson_diverged = (
        methods["lawson"]["status"] == "diverged"
        and methods["lawson"]["time_reached"] < 500.0
    )
    resonance_ok = all(
        methods[m]["status"] == "ok" and methods[m]["time_reached"] == 500.0
        for m in ("symplectic", "explicit")
    )
    _report(
        "Lawson comparator instability on rough data",
        lawson_diverged and resonance_ok,
        f"lawson diverged at t={methods['lawson']['time_reached']:.2f}, "
        f"resonance methods reached T=500",
    )


def test_symplectic_pairing_conservation():
    cfg = ExperimentConfig.from_dict({
        "kind": "symplectic",
        "M": 512,
        "data": {"type": "rough", "theta": 3.5, "seed": 11},
        "methods": ["symplectic"],
        "tau_grid": [0.05],
        "T": 50.0,  # 10^3 steps
        "stride": 100,
        "seed2": 21,
    })
    result = run_experiment(cfg)
    drift = result.summary["methods"]["symplectic"]["max_pairing_err"]
    _report(
        "symplectic pairing conservation (10^3 steps)",
        drift < 1e-10,
        f"max |omega drift| {drift:.3e} (tol 1e-10)",
    )


def test_time_symmetry():
    start = time.perf_counter()
    fp_tol = 1e-12
    worst = 0.0
    rng = np.random.default_rng(2024)
    for case in range(50):
        M = int(rng.choice([32, 64, 128]))
        tau = float(rng.uniform(0.01, 0.1))
        u = random_rough(RoughDataSpec(M=M, theta=3.5, seed=case))
        cfg_f = IntegratorConfig(tau=tau, fp_tol=fp_tol)
        cfg_b = IntegratorConfig(tau=-tau, fp_tol=fp_tol)
        for step in (symplectic_resonance_step, symmetric_lawson_step):
            back = step(step(u, cfg_f).state, cfg_b).state
            worst = max(worst, _l2(back, u))
    elapsed = time.perf_counter() - start
    _report(
        "time symmetry (50 random cases)",
        worst < 4.0 * fp_tol and elapsed < 10.0,
        f"max round-trip L2 gap {worst:.3e} (tol {4.0 * fp_tol:.0e}), "
        f"{elapsed:.1f}s (limit 10s)",
    )


def test_resonant_timestep_sweep(sweep_run):
    result, elapsed = sweep_run
    slope = result.summary["envelope_slope"]
    n_spikes = result.summary["n_spikes"]
    _report(
        "resonant-timestep sweep (200 taus, T=100)",
        1.6 <= slope <= 2.4 and n_spikes >= 1 and elapsed < 900.0,
        f"envelope slope {slope:.4f} (window [1.6, 2.4]), "
        f"{n_spikes} spike(s) at taus "
        f"{[f'{t:.5f}' for t in result.summary['spike_taus']]}, "
        f"{elapsed:.0f}s (limit 900s)",
    )
