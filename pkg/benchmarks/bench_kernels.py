"""Benchmark the numba-compiled double-sum kernels against the pure-numpy
fallbacks.

The fallback path is what you get with KDVRES_DISABLE_NUMBA=1; here both
variants are timed in one process by compiling the same source functions
twice.  Run:

    python3 benchmarks/bench_kernels.py [--sizes 32,64,128] [--repeats 5]
"""

import argparse
import time

import numpy as np

from kdvres.grid import GridSpec
from kdvres.initial_data import RoughDataSpec, random_rough
from kdvres import kernels


def _time(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="32,64,128")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    try:
        from numba import njit
    except ImportError:
        raise SystemExit("numba is not installed; nothing to compare")

    cases = {
        "convolve_square": (
            kernels._convolve_square_py,
            lambda w, modes: (w, modes),
        ),
        "symplectic_sweep": (
            kernels._direct_symplectic_sweep_py,
            lambda w, modes: (w, w, modes, 0.05),
        ),
        "explicit_step": (
            kernels._direct_explicit_step_py,
            lambda w, modes: (w, modes, 0.05),
        ),
    }

    print(f"{'kernel':<18} {'M':>5} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, (py_fn, make_args) in cases.items():
        jit_fn = njit(cache=True)(py_fn)
        for M in sizes:
            state = random_rough(RoughDataSpec(M=M, theta=3.5, seed=0))
            modes = GridSpec(M).modes
            call_args = make_args(state.coeffs, modes)
            jit_fn(*call_args)  # warm up compilation
            t_py = _time(py_fn, call_args, args.repeats)
            t_jit = _time(jit_fn, call_args, args.repeats)
            print(f"{name:<18} {M:>5} {t_py * 1e3:>8.2f}ms {t_jit * 1e3:>8.2f}ms "
                  f"{t_py / t_jit:>7.1f}x")


if __name__ == "__main__":
    main()
