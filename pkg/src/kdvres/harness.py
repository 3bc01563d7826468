"""Declarative experiment drivers: convergence-order studies, long-time
conservation, symplecticity checks, the resonant-timestep sweep, and plain
solves with diagnostics.

Every experiment is a pure function of its config (seeds included);
re-runs produce identical CSV bodies apart from wall-time columns.
Results are written as a CSV (17 significant digits) plus a JSON metadata
sidecar carrying the seed, generator id, config echo and config hash.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field as dc_field
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from . import PRNG_ID, __version__
from .diagnostics import (
    DIAGNOSTICS_COLUMNS,
    DiagnosticsRecord,
    h_error,
    hamiltonian,
    momentum,
    symplectic_pairing,
)
from .grid import GridSpec, SpectralState
from .initial_data import RoughDataSpec, random_rough, smooth_profile
from .integrators import (
    FixedPointDivergence,
    IntegratorConfig,
    Method,
    evolve,
    step_once,
    tangent_step,
)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_REFERENCE_FAILURE = 3
EXIT_ALL_DIVERGED = 4

#: Fixed-point tolerance used where structure preservation is measured at
#: machine accuracy (conservation and symplecticity runs) and for
#: reference trajectories whose tau^4 rule would fall below roundoff.
MACHINE_FP_TOL = 1e-14


class ConfigError(ValueError):
    """The experiment configuration is invalid."""


class ReferenceSolutionError(RuntimeError):
    """The reference trajectory for a convergence study diverged."""


class ExperimentKind(str, Enum):
    CONVERGE = "converge"
    CONSERVE = "conserve"
    SYMPLECTICITY = "symplectic"
    RESONANCE_SWEEP = "sweep"
    SOLVE = "solve"


CSV_COLUMNS = {
    ExperimentKind.CONVERGE: ("method", "tau", "h1_error", "wall_time_s",
                              "fp_iter_mean", "status"),
    ExperimentKind.CONSERVE: ("method", "time", "momentum_err",
                              "hamiltonian_err", "status"),
    ExperimentKind.SYMPLECTICITY: ("method", "time", "pairing_err", "status"),
    ExperimentKind.RESONANCE_SWEEP: ("tau", "max_hamiltonian_err", "status"),
    ExperimentKind.SOLVE: DIAGNOSTICS_COLUMNS,
}

_CONFIG_KEYS = {
    "kind", "M", "data", "methods", "tau_grid", "T", "ref_tau",
    "output_path", "dealias", "stride", "seed2", "fp_tol",
}

_DATA_KEYS_ROUGH = {"type", "theta", "seed"}
_DATA_KEYS_SMOOTH = {"type"}


@dataclass(frozen=True)
class ExperimentConfig:
    kind: ExperimentKind
    M: int
    data: dict
    methods: tuple[Method, ...]
    tau_grid: tuple[float, ...]
    T: float
    ref_tau: Optional[float] = None
    output_path: str = "result.csv"
    dealias: bool = False
    stride: int = 10
    seed2: Optional[int] = None
    fp_tol: Optional[float] = None

    def __post_init__(self):
        if self.M < 4 or self.M % 2 != 0:
            raise ConfigError("M must be even and >= 4")
        dtype = self.data.get("type")
        if dtype == "rough":
            if set(self.data) != _DATA_KEYS_ROUGH:
                raise ConfigError(f"rough data spec needs keys {_DATA_KEYS_ROUGH}")
        elif dtype == "smooth":
            if set(self.data) != _DATA_KEYS_SMOOTH:
                raise ConfigError("smooth data spec takes no extra keys")
        else:
            raise ConfigError(f"unknown data type {dtype!r}")
        if self.kind is ExperimentKind.SOLVE:
            if self.T < 0:
                raise ConfigError("T must be >= 0")
        elif self.T <= 0:
            raise ConfigError("T must be > 0")
        if not self.tau_grid and self.kind is not ExperimentKind.SOLVE:
            raise ConfigError("tau_grid must be nonempty")
        if any(t <= 0 for t in self.tau_grid):
            raise ConfigError("all tau values must be positive")
        if self.kind is ExperimentKind.CONVERGE:
            if not self.methods:
                raise ConfigError("convergence study needs at least one method")
            if self.ref_tau is None:
                raise ConfigError("convergence study needs ref_tau")
            if self.ref_tau > min(self.tau_grid) / 20.0:
                raise ConfigError("ref_tau must be <= min(tau_grid)/20")
        if self.kind is ExperimentKind.SYMPLECTICITY:
            if self.seed2 is None:
                raise ConfigError("symplecticity study needs seed2")
            if dtype != "rough":
                raise ConfigError("symplecticity study needs rough data")
        if self.stride < 1:
            raise ConfigError("stride must be >= 1")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        unknown = set(raw) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "kind" not in raw:
            raise ConfigError("config needs a 'kind'")
        try:
            kind = ExperimentKind(raw["kind"])
        except ValueError:
            raise ConfigError(f"unknown experiment kind {raw['kind']!r}")
        try:
            methods = tuple(Method(m) for m in raw.get("methods", []))
        except ValueError as err:
            raise ConfigError(str(err))
        try:
            return cls(
                kind=kind,
                M=int(raw["M"]),
                data=dict(raw["data"]),
                methods=methods,
                tau_grid=tuple(float(t) for t in raw.get("tau_grid", [])),
                T=float(raw["T"]),
                ref_tau=(None if raw.get("ref_tau") is None
                         else float(raw["ref_tau"])),
                output_path=str(raw.get("output_path", "result.csv")),
                dealias=bool(raw.get("dealias", False)),
                stride=int(raw.get("stride", 10)),
                seed2=(None if raw.get("seed2") is None else int(raw["seed2"])),
                fp_tol=(None if raw.get("fp_tol") is None
                        else float(raw["fp_tol"])),
            )
        except KeyError as err:
            raise ConfigError(f"missing config key: {err.args[0]}")

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {path}: {err}")
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "M": self.M,
            "data": dict(self.data),
            "methods": [m.value for m in self.methods],
            "tau_grid": list(self.tau_grid),
            "T": self.T,
            "ref_tau": self.ref_tau,
            "output_path": self.output_path,
            "dealias": self.dealias,
            "stride": self.stride,
            "seed2": self.seed2,
            "fp_tol": self.fp_tol,
        }

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def initial_state(self, seed_override: Optional[int] = None) -> SpectralState:
        if self.data["type"] == "smooth":
            return smooth_profile(self.M)
        seed = self.data["seed"] if seed_override is None else seed_override
        return random_rough(
            RoughDataSpec(M=self.M, theta=float(self.data["theta"]), seed=int(seed))
        )


@dataclass
class RunResult:
    config: ExperimentConfig
    rows: list[dict] = dc_field(default_factory=list)
    summary: dict = dc_field(default_factory=dict)
    metadata: dict = dc_field(default_factory=dict)

    def write(self, path: Optional[str | Path] = None) -> Path:
        """Write the CSV body and the metadata sidecar; returns CSV path."""
        out = Path(path if path is not None else self.config.output_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        columns = CSV_COLUMNS[self.config.kind]
        with out.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in self.rows:
                writer.writerow([_fmt(row.get(c)) for c in columns])
        sidecar = out.with_suffix(out.suffix + ".meta.json")
        sidecar.write_text(json.dumps(self.metadata, indent=2, sort_keys=True) + "\n")
        return out


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _metadata(cfg: ExperimentConfig) -> dict:
    return {
        "artifact_version": __version__,
        "generator": PRNG_ID,
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash(),
    }


def fit_loglog_slope(taus, errors) -> float:
    """Least-squares slope of log(error) against log(tau)."""
    taus = np.asarray(taus, dtype=np.float64)
    errors = np.asarray(errors, dtype=np.float64)
    if taus.size < 2:
        raise ValueError("need at least two points for a slope fit")
    if np.any(taus <= 0) or np.any(errors <= 0):
        raise ValueError("slope fit needs positive taus and errors")
    lx = np.log(taus)
    ly = np.log(errors)
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


def _step_cfg(cfg: ExperimentConfig, tau: float,
              fp_tol: Optional[float] = None) -> IntegratorConfig:
    tol = fp_tol if fp_tol is not None else cfg.fp_tol
    return IntegratorConfig(tau=tau, fp_tol=tol, dealias=cfg.dealias)


def run_convergence(cfg: ExperimentConfig) -> RunResult:
    """Global H^1 error and wall time at T for each (method, tau) cell.

    The reference trajectory uses the symplectic method at ref_tau.  Its
    own error is estimated by Richardson comparison against a coarser run
    at roughly 20*ref_tau, snapped so its step divides T exactly (second
    order: err(r tau) ~ r^2 err(tau), so the measured gap divided by
    r^2 - 1 bounds the reference error); slope fits exclude rows within
    100x of that floor.
    """
    if cfg.kind is not ExperimentKind.CONVERGE:
        raise ConfigError("config kind must be 'converge'")
    u0 = cfg.initial_state()
    # Snap both control taus so they divide T exactly: landing at T plus a
    # fraction of a step would add a spurious free-flow phase error.
    ref_tau = cfg.T / int(round(cfg.T / cfg.ref_tau))
    ref_tol = max(ref_tau**4, MACHINE_FP_TOL)
    n_floor = max(2, int(round(cfg.T / (20.0 * ref_tau))))
    floor_tau = cfg.T / n_floor
    try:
        ref = evolve(u0, Method.SYMPLECTIC,
                     _step_cfg(cfg, ref_tau, fp_tol=ref_tol), cfg.T)
        floor_run = evolve(u0, Method.SYMPLECTIC,
                           _step_cfg(cfg, floor_tau, fp_tol=ref_tol), cfg.T)
    except FixedPointDivergence as err:
        raise ReferenceSolutionError(str(err)) from err
    ref_state = ref.final_state
    richardson = (floor_tau / ref_tau) ** 2 - 1.0
    floor = h_error(floor_run.final_state, ref_state, 1.0) / richardson

    rows = []
    for method in cfg.methods:
        for tau in cfg.tau_grid:
            try:
                summary = evolve(u0, method, _step_cfg(cfg, tau), cfg.T)
            except FixedPointDivergence:
                rows.append({"method": method.value, "tau": tau,
                             "h1_error": None, "wall_time_s": None,
                             "fp_iter_mean": None, "status": "diverged"})
                continue
            rows.append({
                "method": method.value,
                "tau": tau,
                "h1_error": h_error(summary.final_state, ref_state, 1.0),
                "wall_time_s": summary.wall_time_s,
                "fp_iter_mean": summary.fp_iterations_mean,
                "status": "ok",
            })
    rows.sort(key=lambda r: (r["method"], -r["tau"]))

    slopes = {}
    for method in cfg.methods:
        cells = [r for r in rows
                 if r["method"] == method.value and r["status"] == "ok"
                 and r["h1_error"] is not None
                 and r["h1_error"] >= 100.0 * floor]
        if len(cells) >= 2:
            slopes[method.value] = fit_loglog_slope(
                [r["tau"] for r in cells], [r["h1_error"] for r in cells]
            )
    result = RunResult(cfg, rows=rows,
                       summary={"slopes": slopes, "floor": floor},
                       metadata=_metadata(cfg))
    result.metadata["self_convergence_floor"] = floor
    return result


def _sampled_trajectory(cfg: ExperimentConfig, method: Method, tau: float,
                        u0: SpectralState, fp_tol: Optional[float],
                        sample):
    """Evolve to T, invoking ``sample(n, t, state, report)`` on the stride.

    Returns (status, fp_iterations list). Divergence is reported in-band.
    """
    step_cfg = _step_cfg(cfg, tau, fp_tol=fp_tol)
    n_steps = int(round(cfg.T / tau))
    state = u0
    iters = []
    for n in range(1, n_steps + 1):
        try:
            report = step_once(state, method, step_cfg)
        except FixedPointDivergence:
            return "diverged", iters, (n - 1) * tau
        state = report.state
        iters.append(report.fp_iterations)
        if n % cfg.stride == 0 or n == n_steps:
            sample(n, n * tau, state, report)
    return "ok", iters, n_steps * tau


def run_conservation(cfg: ExperimentConfig) -> RunResult:
    """Momentum and Hamiltonian drift time series for each method."""
    if cfg.kind is not ExperimentKind.CONSERVE:
        raise ConfigError("config kind must be 'conserve'")
    tau = cfg.tau_grid[0]
    u0 = cfg.initial_state()
    i0_0 = momentum(u0)
    i1_0 = hamiltonian(u0)
    fp_tol = cfg.fp_tol if cfg.fp_tol is not None else MACHINE_FP_TOL

    rows = []
    fp_stats = {}
    for method in cfg.methods:
        rows.append({"method": method.value, "time": 0.0,
                     "momentum_err": 0.0, "hamiltonian_err": 0.0,
                     "status": "ok"})

        def sample(n, t, state, report, _m=method):
            rows.append({
                "method": _m.value,
                "time": t,
                "momentum_err": abs(momentum(state) - i0_0),
                "hamiltonian_err": abs(hamiltonian(state) - i1_0),
                "status": "ok",
            })

        status, iters, t_reached = _sampled_trajectory(
            cfg, method, tau, u0, fp_tol, sample
        )
        if status == "diverged":
            rows.append({"method": method.value, "time": t_reached,
                         "momentum_err": None, "hamiltonian_err": None,
                         "status": "diverged"})
        fp_stats[method.value] = {
            "status": status,
            "time_reached": t_reached,
            "fp_iter_mean": float(np.mean(iters)) if iters else 0.0,
            "fp_iter_max": int(max(iters)) if iters else 0,
        }
    rows.sort(key=lambda r: (r["method"], r["time"]))

    summary = {"methods": fp_stats}
    for method in cfg.methods:
        errs = [r["momentum_err"] for r in rows
                if r["method"] == method.value and r["momentum_err"] is not None]
        herrs = [r["hamiltonian_err"] for r in rows
                 if r["method"] == method.value and r["hamiltonian_err"] is not None]
        fp_stats[method.value]["max_momentum_err"] = max(errs) if errs else None
        fp_stats[method.value]["max_hamiltonian_err"] = max(herrs) if herrs else None
    return RunResult(cfg, rows=rows, summary=summary, metadata=_metadata(cfg))


def run_symplecticity(cfg: ExperimentConfig) -> RunResult:
    """Deviation of the symplectic pairing of two transported tangents.

    Symplecticity is a statement about the differential of the one-step
    map, so the harness evolves a base trajectory from the data seed and
    carries two tangent vectors (seeded by seed2 and seed2 + 1) through
    the exact linearization of each step, recording how far their pairing
    moves from its initial value.
    """
    if cfg.kind is not ExperimentKind.SYMPLECTICITY:
        raise ConfigError("config kind must be 'symplectic'")
    tau = cfg.tau_grid[0]
    u0 = cfg.initial_state()
    theta = float(cfg.data["theta"])
    v0 = random_rough(RoughDataSpec(M=cfg.M, theta=theta, seed=cfg.seed2))
    w0 = random_rough(
        RoughDataSpec(M=cfg.M, theta=theta, seed=(cfg.seed2 + 1) % 2**64)
    )
    omega0 = symplectic_pairing(v0, w0)
    fp_tol = cfg.fp_tol if cfg.fp_tol is not None else MACHINE_FP_TOL
    n_steps = int(round(cfg.T / tau))

    rows = []
    summary_methods = {}
    for method in cfg.methods:
        step_cfg = _step_cfg(cfg, tau, fp_tol=fp_tol)
        u, v, w = u0, v0, w0
        rows.append({"method": method.value, "time": 0.0,
                     "pairing_err": 0.0, "status": "ok"})
        status = "ok"
        max_dev = 0.0
        for n in range(1, n_steps + 1):
            try:
                report = tangent_step(u, (v, w), method, step_cfg)
            except FixedPointDivergence:
                status = "diverged"
                rows.append({"method": method.value, "time": (n - 1) * tau,
                             "pairing_err": None, "status": "diverged"})
                break
            u, (v, w) = report.state, report.tangents
            dev = abs(symplectic_pairing(v, w) - omega0)
            max_dev = max(max_dev, dev)
            if n % cfg.stride == 0 or n == n_steps:
                rows.append({"method": method.value, "time": n * tau,
                             "pairing_err": dev, "status": "ok"})
        summary_methods[method.value] = {"status": status,
                                         "max_pairing_err": max_dev}
    rows.sort(key=lambda r: (r["method"], r["time"]))
    return RunResult(cfg, rows=rows, summary={"methods": summary_methods},
                     metadata=_metadata(cfg))


def lower_envelope_fit(taus, errors, n_bins: int = 20):
    """Fit a log-log line through the binned minima (the lower envelope).

    Returns (slope, intercept) of log(err) ~ slope*log(tau) + intercept.
    """
    taus = np.asarray(taus, dtype=np.float64)
    errors = np.asarray(errors, dtype=np.float64)
    keep = (taus > 0) & (errors > 0) & np.isfinite(errors)
    lx, ly = np.log(taus[keep]), np.log(errors[keep])
    if lx.size < 2:
        raise ValueError("not enough finite points for an envelope fit")
    edges = np.linspace(lx.min(), lx.max(), min(n_bins, lx.size) + 1)
    bx, by = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mask = (lx >= lo) & (lx <= hi)
        if np.any(mask):
            i = np.argmin(ly[mask])
            bx.append(lx[mask][i])
            by.append(ly[mask][i])
    slope, intercept = np.polyfit(bx, by, 1)
    return float(slope), float(intercept)


def detect_spikes(taus, errors, ratio: float = 10.0):
    """Indices of points exceeding the lower-envelope fit by ``ratio``."""
    slope, intercept = lower_envelope_fit(taus, errors)
    taus = np.asarray(taus, dtype=np.float64)
    errors = np.asarray(errors, dtype=np.float64)
    predicted = np.exp(slope * np.log(taus) + intercept)
    spikes = [int(i) for i in range(taus.size)
              if np.isfinite(errors[i]) and errors[i] > ratio * predicted[i]]
    return spikes, slope


def run_resonance_sweep(cfg: ExperimentConfig) -> RunResult:
    """Max Hamiltonian drift over [0, T] for each tau in a dense sweep."""
    if cfg.kind is not ExperimentKind.RESONANCE_SWEEP:
        raise ConfigError("config kind must be 'sweep'")
    u0 = cfg.initial_state()
    i1_0 = hamiltonian(u0)
    rows = []
    for tau in cfg.tau_grid:
        step_cfg = _step_cfg(cfg, tau)
        n_steps = int(round(cfg.T / tau))
        state = u0
        max_err = 0.0
        status = "ok"
        for n in range(1, n_steps + 1):
            try:
                state = step_once(state, Method.SYMPLECTIC, step_cfg).state
            except FixedPointDivergence:
                status = "diverged"
                break
            max_err = max(max_err, abs(hamiltonian(state) - i1_0))
        rows.append({"tau": tau,
                     "max_hamiltonian_err": max_err if status == "ok" else None,
                     "status": status})
    rows.sort(key=lambda r: r["tau"])

    ok = [(r["tau"], r["max_hamiltonian_err"]) for r in rows
          if r["status"] == "ok" and r["max_hamiltonian_err"]]
    summary = {}
    if len(ok) >= 4:
        taus, errs = zip(*ok)
        spikes, slope = detect_spikes(taus, errs)
        summary = {"envelope_slope": slope,
                   "n_spikes": len(spikes),
                   "spike_taus": [taus[i] for i in spikes]}
    return RunResult(cfg, rows=rows, summary=summary, metadata=_metadata(cfg))


def dump_state(state: SpectralState, path: str | Path) -> None:
    """Write spectral coefficients as text: one 'm re im' line per mode."""
    lines = ["# kdvres spectral state v1", f"# M {state.grid.M}"]
    M = state.grid.M
    for m in range(-M // 2 + 1, M // 2 + 1):
        c = state.coeffs[m % M]
        lines.append(f"{m} {c.real:.17g} {c.imag:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_state(path: str | Path) -> SpectralState:
    """Read a state written by :func:`dump_state`."""
    text = Path(path).read_text().splitlines()
    header = [ln for ln in text if ln.startswith("# M ")]
    if not header:
        raise ValueError(f"{path}: missing '# M' header")
    M = int(header[0].split()[2])
    coeffs = np.zeros(M, dtype=np.complex128)
    for ln in text:
        if ln.startswith("#") or not ln.strip():
            continue
        m_str, re_str, im_str = ln.split()
        coeffs[int(m_str) % M] = float(re_str) + 1j * float(im_str)
    return SpectralState(GridSpec(M), coeffs)


def run_solve(cfg: ExperimentConfig) -> RunResult:
    """Single trajectory with a diagnostics series and a final-state dump."""
    if cfg.kind is not ExperimentKind.SOLVE:
        raise ConfigError("config kind must be 'solve'")
    tau = cfg.tau_grid[0] if cfg.tau_grid else 0.05
    u0 = cfg.initial_state()
    method = cfg.methods[0] if cfg.methods else Method.SYMPLECTIC
    records = [DiagnosticsRecord(0, 0.0, momentum(u0), hamiltonian(u0),
                                 fp_iterations=0)]
    state = u0
    if cfg.T > 0:
        import time as _time
        start = _time.perf_counter()

        def observer(n, t, st, report):
            if n % cfg.stride == 0 or n == int(round(cfg.T / tau)):
                records.append(DiagnosticsRecord(
                    n, t, momentum(st), hamiltonian(st),
                    fp_iterations=report.fp_iterations,
                    wall_time_s=_time.perf_counter() - start,
                ))

        summary = evolve(u0, method, _step_cfg(cfg, tau), cfg.T, [observer])
        state = summary.final_state

    rows = [dict(zip(DIAGNOSTICS_COLUMNS, rec.to_row())) for rec in records]
    result = RunResult(cfg, rows=rows,
                       summary={"final_momentum": momentum(state)},
                       metadata=_metadata(cfg))
    state_path = Path(cfg.output_path).with_suffix(".state.txt")
    state_path.parent.mkdir(parents=True, exist_ok=True)
    dump_state(state, state_path)
    result.metadata["state_path"] = str(state_path)
    result.summary["final_state"] = state
    return result


RUNNERS = {
    ExperimentKind.CONVERGE: run_convergence,
    ExperimentKind.CONSERVE: run_conservation,
    ExperimentKind.SYMPLECTICITY: run_symplecticity,
    ExperimentKind.RESONANCE_SWEEP: run_resonance_sweep,
    ExperimentKind.SOLVE: run_solve,
}


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    return RUNNERS[cfg.kind](cfg)
