"""Task pipelines behind the CLI: geometry, spectrum, evolve, validate.

All output files carry the config hash for provenance, and every float is
emitted with 17 significant digits so outputs are byte-reproducible across
runs with the same config and seed (the timestamp field is the only
intentional difference).
"""

from __future__ import annotations

import datetime
import os
from typing import List, Optional

import numpy as np

from .config import RunConfig
from .errors import CurvedQError, TaskError
from .expressions import compile_expression
from .fields import CartesianPotential, normal_gauge_fix, uniform_field_potential
from .operators import (
    WaveFunction,
    assemble_surface_hamiltonian,
    normalize,
    sample_geometry,
)
from .solvers import eigensolve_lowest, propagate_cn
from .validate import run_suite


def _fmt(x) -> str:
    """One value as text: floats at 17 significant digits."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float) or isinstance(x, np.floating):
        return f"{float(x):.17g}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def _dump_json(obj, indent: int = 0) -> str:
    """Minimal JSON writer that formats floats at 17 significant digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{inner}"{key}": {_dump_json(val, indent + 1)}'
            for key, val in obj.items()
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{inner}{_dump_json(val, indent + 1)}" for val in seq]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if obj is None:
        return "null"
    return _fmt(obj)


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        fh.write(_dump_json(payload) + "\n")


def _write_csv(path: str, header: List[str], columns: List[np.ndarray]) -> None:
    rows = len(columns[0])
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(col[i]) for col in columns) + "\n")


def _metadata(config: RunConfig, seed: int, extra: Optional[dict] = None) -> dict:
    meta = {
        "config_hash": config.config_hash(),
        "seed": seed,
        "surface": config.surface["kind"],
        "grid": [int(config.grid["n1"]), int(config.grid["n2"])],
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        meta.update(extra)
    return meta


def _build_potential(config: RunConfig):
    cp = uniform_field_potential(config.field["B"], config.field["gauge"])
    v_expr = str(config.field["V"])
    if v_expr.strip() not in ("0", "0.0"):
        v_fn = compile_expression(v_expr, ("x", "y", "z"))
        cp = CartesianPotential(
            a_fn=cp.a_fn,
            v_fn=lambda x: float(v_fn(x[0], x[1], x[2])),
            b_label=cp.b_label,
        )
    return cp


def run(
    config: RunConfig,
    seed: int = 0,
    output_dir: Optional[str] = None,
    verbose: bool = False,
) -> int:
    """Execute the configured task; returns the process exit status."""
    out_dir = output_dir or config.output["directory"]
    os.makedirs(out_dir, exist_ok=True)
    task = config.task["kind"]
    try:
        if task == "geometry":
            _task_geometry(config, seed, out_dir, verbose)
        elif task == "spectrum":
            _task_spectrum(config, seed, out_dir, verbose)
        elif task == "evolve":
            _task_evolve(config, seed, out_dir, verbose)
        elif task == "validate":
            return _task_validate(config, seed, out_dir, verbose)
        else:  # pragma: no cover - guarded by config validation
            raise TaskError(f"unknown task {task!r}")
    except CurvedQError:
        raise
    except (ValueError, KeyError, FloatingPointError) as exc:
        raise TaskError(f"task {task} failed: {exc}") from exc
    return 0


def _surface_stack(config: RunConfig):
    chart = config.build_chart()
    grid = config.build_run_grid(chart)
    geo = sample_geometry(chart, grid)
    return chart, grid, geo


def _task_geometry(config, seed, out_dir, verbose) -> None:
    chart, grid, geo = _surface_stack(config)
    params = config.params
    q1, q2 = grid.meshgrid()
    v_s = (params.hbar**2 / params.mass) * geo.v_s_unit
    path = os.path.join(out_dir, "geometry.csv")
    _write_csv(
        path,
        ["q1", "q2", "V_S", "K", "M", "sqrt_g"],
        [arr.ravel() for arr in (q1, q2, v_s, geo.gauss_curv, geo.mean_curv, geo.sqrt_g)],
    )
    meta_path = os.path.join(out_dir, "geometry.json")
    _write_json(meta_path, {"metadata": _metadata(config, seed)})
    if verbose:
        print(f"wrote {path}")


def _task_spectrum(config, seed, out_dir, verbose) -> None:
    chart, grid, geo = _surface_stack(config)
    params = config.params
    spot = normal_gauge_fix(chart, _build_potential(config), grid)
    hop = assemble_surface_hamiltonian(geo, spot, params)
    k = int(config.task["k"])
    result = eigensolve_lowest(hop, k, seed=seed)
    payload = {
        "eigenvalues": result.eigenvalues,
        "residuals": result.residuals,
        "metadata": _metadata(config, seed, {"solver": result.solver_tag}),
    }
    if "json" in config.output["formats"]:
        path = os.path.join(out_dir, "spectrum.json")
        _write_json(path, payload)
        if verbose:
            print(f"wrote {path}")
    if "csv" in config.output["formats"]:
        q1, q2 = grid.meshgrid()
        for idx, vec in enumerate(result.eigenvectors):
            path = os.path.join(out_dir, f"wavefunction_{idx}.csv")
            _write_csv(
                path,
                ["q1", "q2", "re", "im", "abs2", "sqrt_g"],
                [
                    q1.ravel(), q2.ravel(),
                    vec.values.real.ravel(), vec.values.imag.ravel(),
                    (np.abs(vec.values) ** 2).ravel(), geo.sqrt_g.ravel(),
                ],
            )
        if verbose:
            print(f"wrote {k} wavefunction CSV files")


def _task_evolve(config, seed, out_dir, verbose) -> None:
    chart, grid, geo = _surface_stack(config)
    params = config.params
    spot = normal_gauge_fix(chart, _build_potential(config), grid)
    hop = assemble_surface_hamiltonian(geo, spot, params)
    re_fn = compile_expression(str(config.task["psi0_re"]), ("q1", "q2"))
    im_fn = compile_expression(str(config.task["psi0_im"]), ("q1", "q2"))
    q1, q2 = grid.meshgrid()
    values = np.asarray(re_fn(q1, q2), dtype=complex) + 1j * np.asarray(
        im_fn(q1, q2), dtype=complex
    )
    values = values * np.ones(grid.shape)
    psi0 = normalize(WaveFunction(values=values, grid=grid), geo.sqrt_g)
    trace = propagate_cn(
        hop, psi0, dt=float(config.task["dt"]), steps=int(config.task["steps"])
    )
    path = os.path.join(out_dir, "trace.csv")
    _write_csv(
        path, ["t", "norm", "energy"], [trace.times, trace.norms, trace.energies]
    )
    meta_path = os.path.join(out_dir, "trace.json")
    _write_json(meta_path, {"metadata": _metadata(config, seed)})
    if verbose:
        print(f"wrote {path}")


def _task_validate(config, seed, out_dir, verbose) -> int:
    suite = str(config.task["suite"])
    results = run_suite(suite, seed=seed)
    n_failed = sum(1 for r in results if not r.passed)
    payload = {
        "suite": suite,
        "n_passed": len(results) - n_failed,
        "n_failed": n_failed,
        "checks": [r.to_dict() for r in results],
        "metadata": _metadata(config, seed),
    }
    path = os.path.join(out_dir, "validation.json")
    _write_json(path, payload)
    if verbose or n_failed:
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"[{status}] {r.name}: {r.measured:.3e} (tol {r.tolerance:.3e})")
    if verbose:
        print(f"wrote {path}")
    return 1 if n_failed else 0
