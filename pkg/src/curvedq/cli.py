"""Command-line front end.

Subcommands:
  curvedq run <config.toml>      execute any configured task
  curvedq validate [--suite s]   run a built-in validation suite
  curvedq spectrum [flags]       one-shot spectrum without a config file

CURVEDQ_THREADS caps BLAS/LAPACK parallelism for reproducible timing.
"""

from __future__ import annotations

import argparse
import contextlib
import os
import sys
from typing import List, Optional

from .config import RunConfig, config_from_dict, load_config
from .errors import ConfigError, CurvedQError
from . import tasks


def _thread_cap():
    """Context manager applying the CURVEDQ_THREADS limit, if set."""
    raw = os.environ.get("CURVEDQ_THREADS")
    if not raw:
        return contextlib.nullcontext()
    try:
        n = max(1, int(raw))
    except ValueError:
        print(f"warning: ignoring non-integer CURVEDQ_THREADS={raw!r}", file=sys.stderr)
        return contextlib.nullcontext()
    try:
        from threadpoolctl import threadpool_limits
        return threadpool_limits(limits=n)
    except ImportError:  # pragma: no cover - threadpoolctl ships with scipy stacks
        os.environ.setdefault("OMP_NUM_THREADS", str(n))
        return contextlib.nullcontext()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvedq",
        description="Quantum mechanics of a charged particle on a curved surface",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a task from a TOML config file")
    p_run.add_argument("config", help="path to the TOML run configuration")
    _common_flags(p_run)

    p_val = sub.add_parser("validate", help="run a built-in validation suite")
    p_val.add_argument(
        "--suite", default="all",
        help="suite name: geometry, fields, operators, spectra, evolution, all",
    )
    _common_flags(p_val)

    p_spec = sub.add_parser("spectrum", help="one-shot spectrum from flags")
    p_spec.add_argument("--surface", required=True,
                        help="builtin chart: plane, sphere, cylinder, torus")
    p_spec.add_argument("--r", type=float, default=1.0, help="radius parameter")
    p_spec.add_argument("--R", type=float, default=2.0, dest="big_r",
                        help="torus centre-circle radius")
    p_spec.add_argument("--L", type=float, default=1.0, dest="length",
                        help="cylinder length / plane extent")
    p_spec.add_argument("--B", default="0,0,0",
                        help="uniform field vector, e.g. 0,0,1")
    p_spec.add_argument("--gauge", default="symmetric",
                        help="symmetric or landau-x/y/z")
    p_spec.add_argument("--k", type=int, default=8, help="number of eigenvalues")
    p_spec.add_argument("--n", default="32x32", help="grid size n1xn2")
    _common_flags(p_spec)

    return parser


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output-dir", default=None, help="output directory override")
    p.add_argument("--format", default=None, choices=["json", "csv"],
                   help="restrict outputs to one format")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized parts")
    p.add_argument("--verbose", action="store_true", help="print progress and files")


def _spectrum_config(args) -> RunConfig:
    try:
        b_vec = [float(part) for part in args.B.split(",")]
        n1, n2 = (int(part) for part in args.n.lower().split("x"))
    except ValueError as exc:
        raise ConfigError(f"bad --B or --n value: {exc}") from exc
    surface = {"kind": args.surface}
    if args.surface in ("sphere", "cylinder", "torus"):
        surface["r"] = args.r
    if args.surface == "cylinder":
        surface["length"] = args.length
    if args.surface == "torus":
        surface["big_r"] = args.big_r
    if args.surface == "plane":
        surface["lx"] = args.length
        surface["ly"] = args.length
    doc = {
        "surface": surface,
        "grid": {"n1": n1, "n2": n2},
        "field": {"B": b_vec, "gauge": args.gauge},
        "task": {"kind": "spectrum", "k": args.k},
    }
    return config_from_dict(doc)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = load_config(args.config)
        elif args.command == "validate":
            config = config_from_dict(
                {
                    "surface": {"kind": "sphere"},
                    "task": {"kind": "validate", "suite": args.suite},
                }
            )
        else:
            config = _spectrum_config(args)
        if args.format:
            config.output["formats"] = [args.format]
            config.raw["output"]["formats"] = [args.format]
        with _thread_cap():
            return tasks.run(
                config,
                seed=args.seed,
                output_dir=args.output_dir,
                verbose=args.verbose,
            )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CurvedQError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
