"""Command-line entry point.

One subcommand per experiment kind.  Each accepts either ``--config
file.json`` or inline flags (inline flags override config values).
Summary lines go to stdout, progress and errors to stderr.  Exit codes:
0 success, 2 configuration error, 3 reference-solution failure,
4 every requested method diverged.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import PRNG_ID, __version__
from .harness import (
    EXIT_ALL_DIVERGED,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    EXIT_REFERENCE_FAILURE,
    ConfigError,
    ExperimentConfig,
    ExperimentKind,
    ReferenceSolutionError,
    run_experiment,
)

#: Default directory for result files when output paths are relative.
OUTPUT_DIR_ENV = "KDVRES_OUTPUT_DIR"


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=str, help="JSON experiment config")
    sub.add_argument("-M", type=int, help="number of Fourier modes")
    sub.add_argument("--theta", type=float, help="spectral decay exponent")
    sub.add_argument("--seed", type=int, help="seed for rough initial data")
    sub.add_argument("--smooth", action="store_true",
                     help="use the smooth analytic profile instead")
    sub.add_argument("--methods", type=str,
                     help="comma-separated: symplectic,explicit,lawson")
    sub.add_argument("-T", type=float, help="final time")
    sub.add_argument("--tau", type=float, help="step size (single-tau kinds)")
    sub.add_argument("--stride", type=int, help="sampling stride in steps")
    sub.add_argument("--fp-tol", type=float, help="fixed-point tolerance")
    sub.add_argument("--dealias", action="store_true",
                     help="dealiased (zero-padded) products")
    sub.add_argument("-o", "--output", type=str, help="output CSV path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdv",
        description="Pseudospectral solvers and experiments for periodic KdV",
    )
    parser.add_argument("--version", action="store_true",
                        help="print version and generator id")
    subs = parser.add_subparsers(dest="command")

    solve = subs.add_parser("solve", help="run one trajectory with diagnostics")
    _add_common(solve)
    solve.add_argument("--method", type=str, help="integration method")

    converge = subs.add_parser("converge", help="temporal convergence study")
    _add_common(converge)
    converge.add_argument("--tau-grid", type=str,
                          help="comma-separated tau values")
    converge.add_argument("--ref-tau", type=float,
                          help="reference trajectory step size")

    conserve = subs.add_parser("conserve", help="long-time conservation study")
    _add_common(conserve)

    symplectic = subs.add_parser("symplectic",
                                 help="symplectic-pairing drift study")
    _add_common(symplectic)
    symplectic.add_argument("--seed2", type=int,
                            help="seed for the second trajectory")

    sweep = subs.add_parser("sweep", help="resonant-timestep sweep")
    _add_common(sweep)
    sweep.add_argument("--tau-min", type=float, help="smallest tau")
    sweep.add_argument("--tau-max", type=float, help="largest tau")
    sweep.add_argument("--n-tau", type=int, help="number of tau points")
    return parser


_KIND_BY_COMMAND = {
    "solve": ExperimentKind.SOLVE,
    "converge": ExperimentKind.CONVERGE,
    "conserve": ExperimentKind.CONSERVE,
    "symplectic": ExperimentKind.SYMPLECTICITY,
    "sweep": ExperimentKind.RESONANCE_SWEEP,
}


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    raw: dict = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {args.config}: {err}")
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    raw["kind"] = _KIND_BY_COMMAND[args.command].value

    if args.M is not None:
        raw["M"] = args.M
    if args.smooth:
        raw["data"] = {"type": "smooth"}
    elif args.theta is not None or args.seed is not None:
        data = dict(raw.get("data", {"type": "rough"}))
        if args.theta is not None:
            data["theta"] = args.theta
        if args.seed is not None:
            data["seed"] = args.seed
        raw["data"] = data
    if getattr(args, "method", None):
        raw["methods"] = [args.method]
    if args.methods:
        raw["methods"] = [m.strip() for m in args.methods.split(",") if m.strip()]
    if args.T is not None:
        raw["T"] = args.T
    if args.tau is not None:
        raw["tau_grid"] = [args.tau]
    if getattr(args, "tau_grid", None):
        raw["tau_grid"] = [float(t) for t in args.tau_grid.split(",")]
    if getattr(args, "ref_tau", None) is not None:
        raw["ref_tau"] = args.ref_tau
    if getattr(args, "seed2", None) is not None:
        raw["seed2"] = args.seed2
    if args.stride is not None:
        raw["stride"] = args.stride
    if args.fp_tol is not None:
        raw["fp_tol"] = args.fp_tol
    if args.dealias:
        raw["dealias"] = True
    if args.output:
        raw["output_path"] = args.output

    if args.command == "sweep" and getattr(args, "n_tau", None):
        if args.tau_min is None or args.tau_max is None:
            raise ConfigError("--n-tau needs --tau-min and --tau-max")
        import numpy as np
        raw["tau_grid"] = list(
            np.geomspace(args.tau_min, args.tau_max, args.n_tau)
        )

    out = raw.get("output_path", "result.csv")
    if not os.path.isabs(out):
        base = os.environ.get(OUTPUT_DIR_ENV, "")
        if base:
            raw["output_path"] = str(Path(base) / out)
    return ExperimentConfig.from_dict(raw)


def _summarize(result) -> None:
    cfg = result.config
    print(f"kind={cfg.kind.value} M={cfg.M} rows={len(result.rows)} "
          f"hash={cfg.config_hash()}")
    if cfg.kind is ExperimentKind.CONVERGE:
        for method, slope in result.summary.get("slopes", {}).items():
            print(f"slope[{method}]={slope:.4f}")
        print(f"floor={result.summary['floor']:.3e}")
    elif cfg.kind in (ExperimentKind.CONSERVE, ExperimentKind.SYMPLECTICITY):
        for method, stats in result.summary.get("methods", {}).items():
            fields = " ".join(
                f"{k}={_short(v)}" for k, v in stats.items() if v is not None
            )
            print(f"{method}: {fields}")
    elif cfg.kind is ExperimentKind.RESONANCE_SWEEP:
        s = result.summary
        if s:
            print(f"envelope_slope={s['envelope_slope']:.4f} "
                  f"n_spikes={s['n_spikes']}")
    elif cfg.kind is ExperimentKind.SOLVE:
        print(f"final_momentum={result.summary['final_momentum']:.17g}")
        print(f"state={result.metadata['state_path']}")


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def _all_diverged(result) -> bool:
    cfg = result.config
    if cfg.kind in (ExperimentKind.CONVERGE, ExperimentKind.CONSERVE,
                    ExperimentKind.SYMPLECTICITY):
        methods = {m.value for m in cfg.methods}
        ok = {r["method"] for r in result.rows
              if r["status"] == "ok" and r.get("time", 1.0) != 0.0}
        return bool(methods) and not (methods & ok)
    if cfg.kind is ExperimentKind.RESONANCE_SWEEP:
        return all(r["status"] == "diverged" for r in result.rows)
    return False


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.version:
        print(f"kdvres {__version__} ({PRNG_ID})")
        return EXIT_OK
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG_ERROR

    try:
        cfg = _config_from_args(args)
    except ConfigError as err:
        _log(f"config error: {err}")
        return EXIT_CONFIG_ERROR

    _log(f"running {cfg.kind.value} (M={cfg.M}, T={cfg.T})")
    try:
        result = run_experiment(cfg)
    except ReferenceSolutionError as err:
        _log(f"reference solution failed: {err}")
        return EXIT_REFERENCE_FAILURE
    except ConfigError as err:
        _log(f"config error: {err}")
        return EXIT_CONFIG_ERROR

    path = result.write()
    _log(f"wrote {path}")
    _summarize(result)
    if _all_diverged(result):
        _log("every requested method diverged")
        return EXIT_ALL_DIVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
