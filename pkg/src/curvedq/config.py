"""Declarative run configuration: TOML schema, defaults and validation.

Schema (every key has a default except [surface] and [task]):

    [surface]
    kind = "sphere"            # plane | sphere | cylinder | torus | custom
    r = 1.0                    # sphere/cylinder radius, torus tube radius
    lx = 1.0 ; ly = 1.0        # plane extents
    length = 1.0               # cylinder length
    big_r = 2.0                # torus centre-circle radius
    # custom surfaces: embedding expressions of q1, q2
    x = "cos(q1)" ; y = "sin(q1)" ; z = "q2"
    domain = [[0.0, 6.283185307179586], [0.0, 1.0]]
    periodic = [true, false]

    [grid]
    n1 = 32 ; n2 = 32
    bc = ["auto", "auto"]      # auto | periodic | dirichlet | zero-flux

    [field]
    B = [0.0, 0.0, 0.0]
    gauge = "symmetric"        # symmetric | landau-x | landau-y | landau-z
    V = "0"                    # scalar potential, expression of x, y, z

    [physics]
    mass = 1.0 ; charge = 1.0 ; hbar = 1.0

    [task]
    kind = "spectrum"          # geometry | spectrum | evolve | validate
    k = 8                      # spectrum: eigenpair count
    dt = 0.01 ; steps = 100    # evolve
    psi0_re = "1" ; psi0_im = "0"   # evolve: initial state, expressions of q1, q2
    suite = "all"              # validate

    [output]
    directory = "out"
    formats = ["json", "csv"]
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np
import tomli

from .charts import SurfaceChart, builtin_chart, from_map
from .errors import ConfigError
from .expressions import compile_expression
from .grid import Grid2D, build_grid
from .operators import PhysicalParams

_SURFACE_PARAMS = {
    "plane": ("lx", "ly"),
    "sphere": ("r",),
    "cylinder": ("r", "length"),
    "torus": ("big_r", "r"),
}

_DEFAULTS = {
    "grid": {"n1": 32, "n2": 32, "bc": ["auto", "auto"]},
    "field": {"B": [0.0, 0.0, 0.0], "gauge": "symmetric", "V": "0"},
    "physics": {"mass": 1.0, "charge": 1.0, "hbar": 1.0},
    "output": {"directory": "out", "formats": ["json", "csv"]},
}

_TASK_DEFAULTS = {
    "k": 8,
    "dt": 0.01,
    "steps": 100,
    "psi0_re": "1",
    "psi0_im": "0",
    "suite": "all",
}


@dataclass
class RunConfig:
    """Validated configuration with the raw (defaulted) document retained."""

    surface: dict
    grid: dict
    field: dict
    physics: dict
    task: dict
    output: dict
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def params(self) -> PhysicalParams:
        return PhysicalParams(
            mass=self.physics["mass"],
            charge=self.physics["charge"],
            hbar=self.physics["hbar"],
        )

    def build_chart(self) -> SurfaceChart:
        kind = self.surface["kind"]
        if kind == "custom":
            exprs = [
                compile_expression(self.surface[axis], ("q1", "q2"))
                for axis in ("x", "y", "z")
            ]
            domain = tuple(tuple(map(float, pair)) for pair in self.surface["domain"])
            periodic = tuple(bool(p) for p in self.surface["periodic"])
            return from_map(
                lambda q1, q2: np.array([e(q1, q2) for e in exprs]),
                domain=domain, periodic=periodic, name="custom",
            )
        kwargs = {
            key: float(self.surface[key])
            for key in _SURFACE_PARAMS[kind]
            if key in self.surface
        }
        return builtin_chart(kind, **kwargs)

    def build_run_grid(self, chart: SurfaceChart) -> Grid2D:
        bc = [None if b == "auto" else b for b in self.grid["bc"]]
        return build_grid(chart, int(self.grid["n1"]), int(self.grid["n2"]), bc=bc)

    def config_hash(self) -> str:
        """sha256 over the canonicalized, defaulted document."""
        doc = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(doc.encode()).hexdigest()


def _require(section: dict, key: str, section_name: str):
    if key not in section:
        raise ConfigError(f"missing key {section_name}.{key}")
    return section[key]


def _check_number(section: dict, key: str, section_name: str, positive: bool = False):
    val = section[key]
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise ConfigError(f"{section_name}.{key} must be a number, got {val!r}")
    if positive and not val > 0:
        raise ConfigError(f"{section_name}.{key} must be positive, got {val}")


def load_config(path: str) -> RunConfig:
    """Parse and validate a TOML config file."""
    try:
        with open(path, "rb") as fh:
            doc = tomli.load(fh)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return config_from_dict(doc)


def config_from_dict(doc: dict) -> RunConfig:
    """Apply defaults and validate a configuration document."""
    doc = dict(doc)
    if "surface" not in doc:
        raise ConfigError("missing section [surface]")
    if "task" not in doc:
        raise ConfigError("missing section [task]")

    merged = {}
    for name, defaults in _DEFAULTS.items():
        section = dict(defaults)
        extra = doc.get(name, {})
        if not isinstance(extra, dict):
            raise ConfigError(f"[{name}] must be a table")
        section.update(extra)
        merged[name] = section

    surface = dict(doc["surface"])
    kind = _require(surface, "kind", "surface")
    if kind == "custom":
        for key in ("x", "y", "z", "domain", "periodic"):
            _require(surface, key, "surface")
        dom = surface["domain"]
        if (
            len(dom) != 2
            or any(len(pair) != 2 for pair in dom)
            or any(not pair[1] > pair[0] for pair in dom)
        ):
            raise ConfigError("surface.domain must be two increasing [lo, hi] pairs")
        if len(surface["periodic"]) != 2:
            raise ConfigError("surface.periodic must have two entries")
    elif kind in _SURFACE_PARAMS:
        for key in _SURFACE_PARAMS[kind]:
            if key in surface:
                _check_number(surface, key, "surface", positive=True)
    else:
        raise ConfigError(
            f"surface.kind must be one of {sorted(_SURFACE_PARAMS) + ['custom']},"
            f" got {kind!r}"
        )

    task = dict(_TASK_DEFAULTS)
    task.update(doc["task"])
    if task.get("kind") not in ("geometry", "spectrum", "evolve", "validate"):
        raise ConfigError(f"task.kind invalid or missing: {task.get('kind')!r}")
    if task["kind"] == "spectrum" and not int(task["k"]) >= 1:
        raise ConfigError("task.k must be >= 1")
    if task["kind"] == "evolve":
        if not task["dt"] > 0 or not int(task["steps"]) >= 1:
            raise ConfigError("task.dt must be > 0 and task.steps >= 1")
        for key in ("psi0_re", "psi0_im"):
            compile_expression(str(task[key]), ("q1", "q2"))

    grid = merged["grid"]
    for key in ("n1", "n2"):
        if not isinstance(grid[key], int) or grid[key] < 4:
            raise ConfigError(f"grid.{key} must be an integer >= 4")
    if len(grid["bc"]) != 2 or any(
        b not in ("auto", "periodic", "dirichlet", "zero-flux") for b in grid["bc"]
    ):
        raise ConfigError(f"grid.bc entries invalid: {grid['bc']}")

    fld = merged["field"]
    if len(fld["B"]) != 3 or not all(
        isinstance(v, (int, float)) and np.isfinite(v) for v in fld["B"]
    ):
        raise ConfigError(f"field.B must be three finite numbers, got {fld['B']}")
    if fld["gauge"] not in ("symmetric", "landau-x", "landau-y", "landau-z"):
        raise ConfigError(f"field.gauge invalid: {fld['gauge']!r}")
    compile_expression(str(fld["V"]), ("x", "y", "z"))

    phys = merged["physics"]
    for key in ("mass", "hbar"):
        _check_number(phys, key, "physics", positive=True)
    _check_number(phys, "charge", "physics")

    out = merged["output"]
    if not all(fmt in ("json", "csv") for fmt in out["formats"]):
        raise ConfigError(f"output.formats entries must be json|csv: {out['formats']}")

    raw = {
        "surface": surface, "grid": grid, "field": fld,
        "physics": phys, "task": task, "output": out,
    }
    return RunConfig(
        surface=surface, grid=grid, field=fld, physics=phys,
        task=task, output=out, raw=raw,
    )
