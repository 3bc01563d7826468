"""Time-stepping schemes and the fixed-point solver.

Three production steps operate on the untwisted variable so that phase
tables only ever involve tau and tau/2 (no t_n-dependent arguments):

* the implicit symplectic resonance-based midpoint scheme,
* the explicit (frozen-coefficient) resonance scheme,
* the symmetric Lawson exponential midpoint scheme.

A slow O(M^2) Fourier-sum oracle (``direct_fourier_step``) evaluates the
implicit scheme through literal double sums for cross-validation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .grid import GridSpec, SpectralState, project_coeffs
from .spectral import free_flow

#: Residual level (relative to the state size) treated as roundoff noise;
#: once updates stagnate below it the iteration is accepted even if the
#: configured tolerance is tighter than machine precision allows.
RESIDUAL_FLOOR = 1e-13


class Method(str, Enum):
    SYMPLECTIC = "symplectic"
    EXPLICIT_RESONANCE = "explicit"
    SYMMETRIC_LAWSON = "lawson"


class FixedPointDivergence(RuntimeError):
    """The fixed-point iteration failed to contract.

    Signals that tau is too large for the contraction regime (or, for the
    Lawson scheme on rough data, genuine instability).
    """

    def __init__(self, message: str, step_index: Optional[int] = None,
                 time_reached: Optional[float] = None):
        super().__init__(message)
        self.step_index = step_index
        self.time_reached = time_reached


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size and fixed-point policy.

    ``fp_tol`` defaults to tau^4 (the stopping rule used in the reference
    experiments); the stopping metric is the l2 norm of the update.
    Negative tau is allowed for time-symmetry checks.
    """

    tau: float
    fp_tol: Optional[float] = None
    fp_max_iters: int = 100
    dealias: bool = False

    def __post_init__(self):
        if self.tau == 0:
            raise ValueError("tau must be nonzero")
        if self.fp_tol is not None and self.fp_tol <= 0:
            raise ValueError("fp_tol must be positive")
        if self.fp_max_iters < 1:
            raise ValueError("fp_max_iters must be >= 1")

    @property
    def tolerance(self) -> float:
        return self.fp_tol if self.fp_tol is not None else abs(self.tau) ** 4


@dataclass(frozen=True)
class StepReport:
    """Result of one implicit step."""

    state: SpectralState
    fp_iterations: int
    fp_residual: float


class _Workspace:
    """Phase tables and product closures cached per (M, tau, dealias)."""

    def __init__(self, M: int, tau: float, dealias: bool):
        self.M = M
        self.tau = tau
        grid = GridSpec(M)
        m = grid.modes.astype(np.float64)
        m3 = m**3
        # Operator exp(-tau d_x^3): multiplies mode m by exp(+i m^3 tau).
        self.ff_fwd = np.exp(1j * m3 * tau)
        self.ff_bwd = np.conj(self.ff_fwd)
        self.ff_fwd_half = np.exp(1j * m3 * (tau / 2.0))
        self.ff_bwd_half = np.conj(self.ff_fwd_half)
        self.im = 1j * m
        self.inv_im = np.zeros(M, dtype=np.complex128)
        nz = m != 0
        self.inv_im[nz] = 1.0 / (1j * m[nz])
        self.inv_im[M // 2] = 0.0
        self._neg = (-np.arange(M)) % M
        self._dealias = dealias
        if dealias:
            K = 2 * M
            self._K = K
            half = M // 2
            self._pad_pos = half + 1
            self._pad_neg = half - 1

    def _field(self, c: np.ndarray) -> np.ndarray:
        if self._dealias:
            K = self._K
            padded = np.zeros(K, dtype=np.complex128)
            padded[: self._pad_pos] = c[: self._pad_pos]
            if self._pad_neg:
                padded[K - self._pad_neg :] = c[self.M - self._pad_neg :]
            return (K * np.fft.ifft(padded)).real
        return (self.M * np.fft.ifft(c)).real

    def _spectrum(self, samples: np.ndarray) -> np.ndarray:
        M = self.M
        if self._dealias:
            K = self._K
            sq = np.fft.fft(samples) / K
            out = np.concatenate([sq[: self._pad_pos], sq[K - self._pad_neg :]])
        else:
            out = np.fft.fft(samples) / M
        out[0] = 0.0
        out[M // 2] = 0.0
        out = 0.5 * (out + np.conj(out[self._neg]))
        return out

    def square(self, c: np.ndarray) -> np.ndarray:
        """Projected spectrum of the squared field."""
        s = self._field(c)
        return self._spectrum(s * s)

    def product(self, c1: np.ndarray, c2: np.ndarray) -> np.ndarray:
        """Projected spectrum of the product of two fields (the bilinear
        form underlying ``square``: product(c, c) == square(c))."""
        return self._spectrum(self._field(c1) * self._field(c2))


@lru_cache(maxsize=64)
def _workspace(M: int, tau: float, dealias: bool) -> _Workspace:
    return _Workspace(M, tau, dealias)


def _l2(c: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(c) ** 2)))


def _solve_fixed_point(
    sweep: Callable[[np.ndarray], np.ndarray],
    y0: np.ndarray,
    tol: float,
    max_iters: int,
) -> tuple[np.ndarray, int, float]:
    """Iterate ``sweep`` from ``y0`` until the l2 update drops below tol.

    Raises FixedPointDivergence when the residual grows by more than 10x
    between sweeps, becomes non-finite, or the iteration cap is reached.
    Stagnation at roundoff level is accepted as converged.
    """
    floor = RESIDUAL_FLOOR * max(1.0, _l2(y0))
    y = y0
    prev_res = None
    for k in range(1, max_iters + 1):
        y_new = sweep(y)
        res = _l2(y_new - y)
        if not np.isfinite(res):
            raise FixedPointDivergence("fixed-point residual is non-finite")
        if res <= tol:
            return y_new, k, res
        if prev_res is not None:
            if res <= floor and res >= prev_res:
                return y_new, k, res
            if res > 10.0 * prev_res:
                raise FixedPointDivergence(
                    f"fixed-point residual grew from {prev_res:.3e} to "
                    f"{res:.3e}; tau is likely above the contraction threshold"
                )
        prev_res = res
        y = y_new
    raise FixedPointDivergence(
        f"fixed-point iteration did not converge in {max_iters} sweeps "
        f"(last residual {prev_res:.3e}, tol {tol:.3e})"
    )


def _symplectic_sweep_factory(ws: _Workspace, x: np.ndarray):
    a_lin = ws.ff_fwd * x
    p = ws.inv_im * x

    def sweep(y: np.ndarray) -> np.ndarray:
        w2 = ws.ff_bwd * (ws.inv_im * y) + p
        w1 = ws.ff_fwd * w2
        out = a_lin + (ws.square(w1) - ws.ff_fwd * ws.square(w2)) / 24.0
        out[0] = 0.0
        out[ws.M // 2] = 0.0
        return out

    return sweep


def symplectic_resonance_step(u_n: SpectralState, cfg: IntegratorConfig) -> StepReport:
    """One step of the implicit symplectic resonance-based midpoint scheme.

    Solves
      u1 = FF(u0) + (1/24)(Dinv u1 + FF Dinv u0)^2
                  - (1/24) FF (FFinv Dinv u1 + Dinv u0)^2
    (FF the linear propagator over tau, Dinv the zero-mean antiderivative)
    by fixed-point iteration started from u0.
    """
    ws = _workspace(u_n.grid.M, cfg.tau, cfg.dealias)
    sweep = _symplectic_sweep_factory(ws, u_n.coeffs)
    y, iters, res = _solve_fixed_point(
        sweep, np.array(u_n.coeffs), cfg.tolerance, cfg.fp_max_iters
    )
    state = SpectralState(u_n.grid, project_coeffs(y, ws.M))
    return StepReport(state=state, fp_iterations=iters, fp_residual=res)


def explicit_resonance_step(u_n: SpectralState, cfg: IntegratorConfig) -> SpectralState:
    """Frozen-coefficient first-order resonance step (explicit comparator)."""
    ws = _workspace(u_n.grid.M, cfg.tau, cfg.dealias)
    x = u_n.coeffs
    p = ws.inv_im * x
    out = ws.ff_fwd * x + (ws.square(ws.ff_fwd * p) - ws.ff_fwd * ws.square(p)) / 6.0
    return SpectralState(u_n.grid, project_coeffs(out, ws.M))


def _lawson_sweep_factory(ws: _Workspace, x: np.ndarray, tau: float):
    a_lin = ws.ff_fwd * x
    x_half = ws.ff_fwd_half * x

    def sweep(y: np.ndarray) -> np.ndarray:
        w = 0.5 * (x_half + ws.ff_bwd_half * y)
        nonlin = 0.5 * ws.im * ws.square(w)
        out = a_lin + tau * (ws.ff_fwd_half * nonlin)
        out[0] = 0.0
        out[ws.M // 2] = 0.0
        return out

    return sweep


def symmetric_lawson_step(u_n: SpectralState, cfg: IntegratorConfig) -> StepReport:
    """Implicit-midpoint Lawson exponential step.

    The midpoint argument averages the half-step free flow of u0 forward
    and of u1 backward; the Burgers nonlinearity (1/2) d_x (w^2) is
    evaluated there and propagated over the remaining half step.
    """
    ws = _workspace(u_n.grid.M, cfg.tau, cfg.dealias)
    sweep = _lawson_sweep_factory(ws, u_n.coeffs, cfg.tau)
    y, iters, res = _solve_fixed_point(
        sweep, np.array(u_n.coeffs), cfg.tolerance, cfg.fp_max_iters
    )
    state = SpectralState(u_n.grid, project_coeffs(y, ws.M))
    return StepReport(state=state, fp_iterations=iters, fp_residual=res)


@dataclass(frozen=True)
class TangentStepReport:
    """Base step plus tangent vectors advanced by the exact linearization."""

    state: SpectralState
    tangents: tuple[SpectralState, ...]
    fp_iterations: int


def tangent_step(
    u_n: SpectralState,
    tangents: Sequence[SpectralState],
    method: Method,
    cfg: IntegratorConfig,
) -> TangentStepReport:
    """Advance a state and tangent vectors through the differential of the
    chosen one-step map (the variational equation of the scheme).

    This is the object the symplectic-structure statement concerns: the
    pairing omega of two tangent vectors transported this way is an
    invariant of the symplectic scheme.  Implicit linearizations are
    solved by the same fixed-point machinery as the base step.
    """
    ws = _workspace(u_n.grid.M, cfg.tau, cfg.dealias)
    x = u_n.coeffs
    base = step_once(u_n, method, cfg)
    y = base.state.coeffs
    out = []

    if method is Method.SYMPLECTIC:
        w2 = ws.ff_bwd * (ws.inv_im * y) + ws.inv_im * x
        w1 = ws.ff_fwd * w2

        for t in tangents:
            dx = t.coeffs
            lin = ws.ff_fwd * dx
            dp = ws.inv_im * dx

            def sweep(dy: np.ndarray) -> np.ndarray:
                dw2 = ws.ff_bwd * (ws.inv_im * dy) + dp
                dw1 = ws.ff_fwd * dw2
                d = lin + (ws.product(w1, dw1) - ws.ff_fwd * ws.product(w2, dw2)) / 12.0
                d[0] = 0.0
                d[ws.M // 2] = 0.0
                return d

            dy, _, _ = _solve_fixed_point(
                sweep, np.array(dx), cfg.tolerance, cfg.fp_max_iters
            )
            out.append(SpectralState(u_n.grid, project_coeffs(dy, ws.M)))

    elif method is Method.EXPLICIT_RESONANCE:
        p = ws.inv_im * x
        fp = ws.ff_fwd * p
        for t in tangents:
            dx = t.coeffs
            dp = ws.inv_im * dx
            d = ws.ff_fwd * dx + (
                ws.product(fp, ws.ff_fwd * dp) - ws.ff_fwd * ws.product(p, dp)
            ) / 3.0
            out.append(SpectralState(u_n.grid, project_coeffs(d, ws.M)))

    elif method is Method.SYMMETRIC_LAWSON:
        w = 0.5 * (ws.ff_fwd_half * x + ws.ff_bwd_half * y)
        for t in tangents:
            dx = t.coeffs
            lin = ws.ff_fwd * dx
            dx_half = ws.ff_fwd_half * dx

            def sweep(dy: np.ndarray) -> np.ndarray:
                dw = 0.5 * (dx_half + ws.ff_bwd_half * dy)
                d = lin + cfg.tau * (ws.ff_fwd_half * (ws.im * ws.product(w, dw)))
                d[0] = 0.0
                d[ws.M // 2] = 0.0
                return d

            dy, _, _ = _solve_fixed_point(
                sweep, np.array(dx), cfg.tolerance, cfg.fp_max_iters
            )
            out.append(SpectralState(u_n.grid, project_coeffs(dy, ws.M)))
    else:
        raise ValueError(f"unknown method {method!r}")

    return TangentStepReport(
        state=base.state, tangents=tuple(out), fp_iterations=base.fp_iterations
    )


MAX_DIRECT_MODES = 128


def direct_fourier_step(u_n: SpectralState, cfg: IntegratorConfig) -> SpectralState:
    """Slow Fourier-sum oracle for the symplectic step (literal sums).

    Iterates the twisted-variable fixed point through explicit O(M^2)
    double sums over the aliased index set, then removes the twist.
    Gated to small M.
    """
    M = u_n.grid.M
    if M > MAX_DIRECT_MODES:
        raise ValueError(f"direct oracle gated to M <= {MAX_DIRECT_MODES}")
    if cfg.dealias:
        raise ValueError("direct oracle implements the aliased product only")
    modes = u_n.grid.modes
    x = u_n.coeffs

    def sweep(y: np.ndarray) -> np.ndarray:
        return kernels.direct_symplectic_sweep(y, x, modes, cfg.tau)

    v_next, _, _ = _solve_fixed_point(
        sweep, np.array(x), cfg.tolerance, cfg.fp_max_iters
    )
    u_next = free_flow(SpectralState(u_n.grid, v_next), -cfg.tau)
    return SpectralState(u_n.grid, project_coeffs(u_next.coeffs, M))


def direct_explicit_resonance_step(
    u_n: SpectralState, cfg: IntegratorConfig
) -> SpectralState:
    """Frozen-coefficient Fourier-sum oracle for the explicit step."""
    M = u_n.grid.M
    if M > MAX_DIRECT_MODES:
        raise ValueError(f"direct oracle gated to M <= {MAX_DIRECT_MODES}")
    v_next = kernels.direct_explicit_step(u_n.coeffs, u_n.grid.modes, cfg.tau)
    u_next = free_flow(SpectralState(u_n.grid, v_next), -cfg.tau)
    return SpectralState(u_n.grid, project_coeffs(u_next.coeffs, M))


Observer = Callable[[int, float, SpectralState, StepReport], None]


@dataclass
class TrajectorySummary:
    final_state: SpectralState
    n_steps: int
    fp_iterations_total: int = 0
    fp_iterations_max: int = 0
    wall_time_s: float = 0.0

    @property
    def fp_iterations_mean(self) -> float:
        return self.fp_iterations_total / self.n_steps if self.n_steps else 0.0


def step_once(
    u_n: SpectralState, method: Method, cfg: IntegratorConfig
) -> StepReport:
    """Uniform single-step interface returning a StepReport for any method."""
    if method is Method.SYMPLECTIC:
        return symplectic_resonance_step(u_n, cfg)
    if method is Method.SYMMETRIC_LAWSON:
        return symmetric_lawson_step(u_n, cfg)
    if method is Method.EXPLICIT_RESONANCE:
        state = explicit_resonance_step(u_n, cfg)
        return StepReport(state=state, fp_iterations=1, fp_residual=0.0)
    raise ValueError(f"unknown method {method!r}")


def evolve(
    u_0: SpectralState,
    method: Method,
    cfg: IntegratorConfig,
    T: float,
    observers: Sequence[Observer] = (),
) -> TrajectorySummary:
    """Iterate the chosen step N = round(T/tau) times from u_0.

    Observers are invoked with (n, t_n, state, report) after each step.
    Step failures are re-raised with the step index and time attached.
    """
    n_steps = int(round(T / cfg.tau))
    if n_steps < 0:
        raise ValueError("T and tau must have the same sign")
    summary = TrajectorySummary(final_state=u_0, n_steps=n_steps)
    state = u_0
    start = time.perf_counter()
    for n in range(1, n_steps + 1):
        try:
            report = step_once(state, method, cfg)
        except FixedPointDivergence as err:
            raise FixedPointDivergence(
                f"step {n} (t={n * cfg.tau:.6g}): {err}",
                step_index=n,
                time_reached=(n - 1) * cfg.tau,
            ) from err
        state = report.state
        summary.fp_iterations_total += report.fp_iterations
        summary.fp_iterations_max = max(
            summary.fp_iterations_max, report.fp_iterations
        )
        for obs in observers:
            obs(n, n * cfg.tau, state, report)
    summary.final_state = state
    summary.wall_time_s = time.perf_counter() - start
    return summary
