"""Built-in validation suites: fast, seeded, deterministic checks.

Each check returns (name, passed, measured, tolerance, detail).  Suites are
sized to run in seconds so `curvedq validate --suite all` stays desk-scale;
the exhaustive acceptance runs live in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Callable, Dict, List

import numpy as np

from .charts import cylinder, sphere, torus
from .fields import apply_surface_gauge, normal_gauge_fix, uniform_field_potential
from .geometry import adapted_metric_at, rescale_factor, weingarten_at
from .grid import build_grid
from .operators import (
    PhysicalParams,
    WaveFunction,
    assemble_surface_hamiltonian,
    hermiticity_defect,
    normalize,
    sample_geometry,
)
from .solvers import eigensolve_lowest, propagate_cn
from .systems import (
    SystemSpec,
    cylinder_closed_form,
    reference_cylinder_hamiltonian,
    reference_sphere_hamiltonian,
    reference_torus_hamiltonian,
    sphere_closed_form,
    torus_axisymmetric_oracle,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _check(name: str, measured: float, tolerance: float, detail: str = "") -> CheckResult:
    return CheckResult(
        name=name, passed=bool(measured <= tolerance),
        measured=float(measured), tolerance=float(tolerance), detail=detail,
    )


def suite_geometry(seed: int) -> List[CheckResult]:
    rng = np.random.RandomState(seed)
    out = []
    # geometric potential closed forms at random nodes
    sph = sphere(1.3)
    worst = 0.0
    for _ in range(20):
        q = (rng.uniform(0.2, np.pi - 0.2), rng.uniform(0.0, 2 * np.pi))
        worst = max(worst, abs(weingarten_at(sph, q).v_s - 0.0))
    out.append(_check("geometry.sphere-vs-zero", worst, 1e-12))

    r = 0.8
    cyl = cylinder(r, 2.0)
    worst = 0.0
    for _ in range(20):
        q = (rng.uniform(0.0, 2 * np.pi), rng.uniform(0.1, 1.9))
        worst = max(worst, abs(weingarten_at(cyl, q).v_s + 1.0 / (8 * r**2)))
    out.append(_check("geometry.cylinder-vs-closed-form", worst, 1e-12))

    big_r, rt = 2.0, 0.7
    tor = torus(big_r, rt)
    worst = 0.0
    for _ in range(20):
        q = (rng.uniform(0.0, 2 * np.pi), rng.uniform(0.0, 2 * np.pi))
        w = big_r + rt * np.cos(q[0])
        worst = max(
            worst, abs(weingarten_at(tor, q).v_s + 0.5 * (big_r / (2 * rt * w)) ** 2)
        )
    out.append(_check("geometry.torus-vs-closed-form", worst, 1e-12))

    # det(G) = f^2 det(g) at random offsets
    worst = 0.0
    for _ in range(20):
        q = (rng.uniform(0.0, 2 * np.pi), rng.uniform(0.0, 2 * np.pi))
        q3 = rng.uniform(-0.05, 0.05)
        gp = weingarten_at(tor, q)
        G = adapted_metric_at(tor, q, q3).G
        f = rescale_factor(gp, q3)
        det_g = gp.sqrt_g**2
        worst = max(worst, abs(np.linalg.det(G) - f**2 * det_g) / det_g)
    out.append(_check("geometry.adapted-det-identity", worst, 1e-10))
    return out


def suite_fields(seed: int) -> List[CheckResult]:
    rng = np.random.RandomState(seed)
    out = []
    # sphere symmetric-gauge pullback vs closed form A_phi = B r^2 sin^2/2
    r, b = 1.1, 0.7
    sph = sphere(r)
    cp = uniform_field_potential([0.0, 0.0, b], "symmetric")
    worst = 0.0
    from .fields import pullback_potential

    for _ in range(20):
        q = (rng.uniform(0.2, np.pi - 0.2), rng.uniform(0.0, 2 * np.pi))
        a1, a2, a3 = pullback_potential(sph, cp, q)
        worst = max(
            worst, abs(a1), abs(a2 - 0.5 * b * r**2 * np.sin(q[0]) ** 2), abs(a3)
        )
    out.append(_check("fields.sphere-pullback-closed-form", worst, 1e-12))

    # exact lattice gauge invariance of the assembled spectrum
    cyl = cylinder(1.0, 4.0)
    grid = build_grid(cyl, 16, 16, bc=(None, "dirichlet"))
    geo = sample_geometry(cyl, grid)
    params = PhysicalParams()
    spot = normal_gauge_fix(cyl, uniform_field_potential([0, 0, 0.4], "symmetric"), grid)
    spot2 = apply_surface_gauge(
        spot, lambda th, y: 0.3 * np.sin(th) * y + 0.1 * y**2, grid
    )
    e1 = eigensolve_lowest(assemble_surface_hamiltonian(geo, spot, params), 4).eigenvalues
    e2 = eigensolve_lowest(assemble_surface_hamiltonian(geo, spot2, params), 4).eigenvalues
    out.append(
        _check("fields.lattice-gauge-exactness", np.max(np.abs(e1 - e2)), 1e-10)
    )
    return out


def suite_operators(seed: int) -> List[CheckResult]:
    out = []
    params = PhysicalParams()

    def elementwise(ha, hb):
        diff = ha.matrix - hb.matrix
        scale = np.max(np.abs(ha.matrix.data))
        return np.max(np.abs(diff.data)) / scale if diff.nnz else 0.0

    cases = [
        ("sphere", sphere(1.0), SystemSpec("sphere", r=1.0, b=0.6),
         uniform_field_potential([0, 0, 0.6], "symmetric"),
         reference_sphere_hamiltonian, None),
        ("cylinder", cylinder(1.0, 5.0),
         SystemSpec("cylinder", r=1.0, length=5.0, b0=0.5, b1=0.3),
         uniform_field_potential([0, 0.5, 0], "symmetric")
         + uniform_field_potential([0, 0, 0.3], "landau-x"),
         reference_cylinder_hamiltonian, (None, "periodic")),
        ("torus", torus(2.0, 0.8),
         SystemSpec("torus", r=0.8, big_r=2.0, b0=0.4, b1=0.3),
         uniform_field_potential([0.3, 0, 0.4], "symmetric"),
         reference_torus_hamiltonian, None),
    ]
    for name, chart, spec, cp, builder, bc in cases:
        grid = build_grid(chart, 16, 16, bc=bc)
        href = builder(spec, grid)
        geo = sample_geometry(chart, grid)
        spot = normal_gauge_fix(chart, cp, grid)
        hgen = assemble_surface_hamiltonian(geo, spot, params)
        out.append(
            _check(f"operators.{name}-reference-vs-generic", elementwise(href, hgen), 1e-10)
        )
        out.append(
            _check(f"operators.{name}-hermiticity", hermiticity_defect(hgen), 1e-12)
        )
    return out


def suite_spectra(seed: int) -> List[CheckResult]:
    out = []
    # sphere free levels at modest resolution
    spec = SystemSpec("sphere", r=1.0)
    grid = build_grid(sphere(1.0), 32, 64)
    res = eigensolve_lowest(reference_sphere_hamiltonian(spec, grid), 9, seed=seed)
    oracle = sphere_closed_form(spec, 9)
    err = np.max(np.abs(res.eigenvalues - oracle) / np.maximum(np.abs(oracle), 1e-1))
    out.append(_check("spectra.sphere-free", err, 2e-2))

    # cylinder AB: fractional flux and exact integer-flux periodicity
    grid_c = build_grid(cylinder(1.0, 10.0), 32, 32, bc=(None, "periodic"))
    evs = {}
    for nu in (0.0, 0.25, 1.0):
        spec_c = SystemSpec("cylinder", r=1.0, length=10.0, b0=2 * nu)
        res = eigensolve_lowest(reference_cylinder_hamiltonian(spec_c, grid_c), 6, seed=seed)
        oracle = cylinder_closed_form(spec_c, 6)
        scale = np.maximum(np.abs(oracle), 0.1 * np.ptp(oracle))
        evs[nu] = res.eigenvalues
        out.append(
            _check(
                f"spectra.cylinder-ab-nu-{nu}",
                np.max(np.abs(res.eigenvalues - oracle) / scale),
                2e-2,
            )
        )
    out.append(
        _check(
            "spectra.cylinder-integer-flux",
            np.max(np.abs(np.sort(evs[0.0]) - np.sort(evs[1.0]))),
            1e-8,
        )
    )

    # torus vs 1D oracle
    spec_t = SystemSpec("torus", r=1.0, big_r=2.0, b0=0.3)
    grid_t = build_grid(torus(2.0, 1.0), 32, 32)
    res = eigensolve_lowest(reference_torus_hamiltonian(spec_t, grid_t), 6, seed=seed)
    oracle = torus_axisymmetric_oracle(spec_t, 6)
    scale = np.maximum(np.abs(oracle), 0.1 * np.ptp(oracle))
    out.append(
        _check(
            "spectra.torus-vs-1d-oracle",
            np.max(np.abs(res.eigenvalues - oracle) / scale),
            2e-2,
        )
    )
    return out


def suite_evolution(seed: int) -> List[CheckResult]:
    out = []
    params = PhysicalParams()
    sph = sphere(1.0)
    grid = build_grid(sph, 16, 32)
    geo = sample_geometry(sph, grid)
    spot = normal_gauge_fix(sph, uniform_field_potential([0, 0, 0.5], "symmetric"), grid)
    hop = assemble_surface_hamiltonian(geo, spot, params)
    rng = np.random.RandomState(seed)
    psi0 = WaveFunction(
        values=rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape),
        grid=grid,
    )
    psi0 = normalize(psi0, geo.sqrt_g)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        trace = propagate_cn(hop, psi0, dt=0.001, steps=200)
    out.append(_check("evolution.norm-drift", np.max(np.abs(trace.norms - 1.0)), 1e-10))
    out.append(
        _check(
            "evolution.energy-drift",
            np.max(np.abs(trace.energies - trace.energies[0]))
            / max(abs(trace.energies[0]), 1e-12),
            1e-8,
        )
    )
    return out


SUITES: Dict[str, Callable[[int], List[CheckResult]]] = {
    "geometry": suite_geometry,
    "fields": suite_fields,
    "operators": suite_operators,
    "spectra": suite_spectra,
    "evolution": suite_evolution,
}


def run_suite(name: str, seed: int = 0) -> List[CheckResult]:
    """Run one named suite, or every suite for name = "all"."""
    if name == "all":
        results = []
        for key in SUITES:
            results.extend(SUITES[key](seed))
        return results
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; have {sorted(SUITES) + ['all']}")
    return SUITES[name](seed)
