"""Cartesian potentials, pullback, normal gauge and surface gauge transforms."""

import numpy as np
import pytest

import curvedq as cq
from curvedq.errors import PeriodicityViolation
from curvedq.fields import pullback_potential


def numerical_curl(a_fn, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    curl = np.zeros(3)
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        ei, ej = np.eye(3)[i], np.eye(3)[j]
        dj_ai = (a_fn(x + h * ej)[i] - a_fn(x - h * ej)[i]) / (2 * h)
        di_aj = (a_fn(x + h * ei)[j] - a_fn(x - h * ei)[j]) / (2 * h)
        curl[k] = di_aj - dj_ai
    return curl


def test_uniform_field_curl_oracle():
    rng = np.random.RandomState(0)
    for gauge in ("symmetric", "landau-x", "landau-z"):
        B = rng.standard_normal(3)
        if gauge == "landau-x":
            B[0] = 0.0
        if gauge == "landau-z":
            B[2] = 0.0
        cp = cq.uniform_field_potential(B, gauge)
        for _ in range(20):
            x = rng.uniform(-2, 2, size=3)
            assert np.allclose(
                numerical_curl(cp.a_fn, x), B, atol=1e-6 * max(1, np.linalg.norm(B))
            )


def test_uniform_field_closed_forms():
    cp = cq.uniform_field_potential([0, 0, 2.0], "symmetric")
    assert np.allclose(cp.a_fn(np.array([1.0, 3.0, 5.0])), [-3.0, 1.0, 0.0])
    cp = cq.uniform_field_potential([0, 0, 2.0], "landau-x")
    assert np.allclose(cp.a_fn(np.array([1.5, 3.0, 5.0])), [0.0, 3.0, 0.0])
    zero = cq.uniform_field_potential([0, 0, 0], "symmetric")
    assert np.allclose(zero.a_fn(np.array([1.0, 2.0, 3.0])), 0.0)


def test_landau_gauge_requires_perpendicular_field():
    with pytest.raises(ValueError):
        cq.uniform_field_potential([1.0, 0, 0], "landau-x")
    with pytest.raises(ValueError):
        cq.uniform_field_potential([0, 0, 1.0], "landau-q")


def test_potential_addition():
    a = cq.uniform_field_potential([0, 0.5, 0], "symmetric")
    b = cq.uniform_field_potential([0, 0, 0.3], "landau-x")
    c = a + b
    x = np.array([0.3, -1.2, 0.8])
    assert np.allclose(c.a_fn(x), a.a_fn(x) + b.a_fn(x))
    assert np.allclose(c.b_label, [0, 0.5, 0.3])


def test_sphere_pullback_paper_form():
    r, b = 1.4, 0.9
    sph = cq.sphere(r)
    cp = cq.uniform_field_potential([0, 0, b], "symmetric")
    rng = np.random.RandomState(1)
    for _ in range(10):
        th, ph = rng.uniform(0.2, np.pi - 0.2), rng.uniform(0, 2 * np.pi)
        a1, a2, a3 = pullback_potential(sph, cp, (th, ph))
        assert a1 == pytest.approx(0.0, abs=1e-12)
        assert a2 == pytest.approx(0.5 * b * r**2 * np.sin(th) ** 2, abs=1e-12)
        assert a3 == pytest.approx(0.0, abs=1e-12)


def test_torus_pullback_paper_form():
    big_r, r, b0, b1 = 2.0, 0.8, 0.7, 0.4
    tor = cq.torus(big_r, r)
    cp = cq.uniform_field_potential([b1, 0, b0], "symmetric")
    rng = np.random.RandomState(2)
    for _ in range(10):
        th, ph = rng.uniform(0, 2 * np.pi, size=2)
        w = big_r + r * np.cos(th)
        a1, a2, a3 = pullback_potential(tor, cp, (th, ph))
        assert a1 == pytest.approx(
            0.5 * b1 * r * np.sin(ph) * (big_r * np.cos(th) + r), abs=1e-12
        )
        assert a2 == pytest.approx(
            0.5 * w * (b0 * w - b1 * r * np.sin(th) * np.cos(ph)), abs=1e-12
        )
        # the in-plane component leaves a genuine normal residual
        # (the chart-order normal of the torus points inward)
        assert a3 == pytest.approx(
            -0.5 * b1 * big_r * np.sin(th) * np.sin(ph), abs=1e-12
        )


def test_pullback_off_surface_sphere():
    """At q3 != 0 the pullback lives on the concentric sphere of radius r+q3."""
    r, b, q3 = 1.0, 0.6, 0.2
    sph = cq.sphere(r)
    cp = cq.uniform_field_potential([0, 0, b], "symmetric")
    th = 1.1
    a1, a2, a3 = pullback_potential(sph, cp, (th, 0.7), q3=q3)
    # chart-order normal is outward, so the shifted radius is r + q3
    assert a2 == pytest.approx(0.5 * b * (r + q3) ** 2 * np.sin(th) ** 2, abs=1e-10)
    assert a1 == pytest.approx(0.0, abs=1e-12)


def test_normal_gauge_gamma_constant_a3():
    """A3 = c constant along the normal gives gamma = -c q3."""
    pl = cq.plane(1.0, 1.0)
    c = 0.37
    cp = cq.CartesianPotential(a_fn=lambda x: np.array([0.0, 0.0, c]))
    gamma = cq.normal_gauge_gamma(pl, cp, (0.5, 0.5), q3=0.8)
    assert gamma == pytest.approx(-c * 0.8, abs=1e-10)


def test_normal_gauge_fix_identity_tag_and_values():
    sph = cq.sphere(1.0)
    grid = cq.build_grid(sph, 8, 8)
    cp = cq.uniform_field_potential([0, 0, 0.5], "symmetric")
    spot = cq.normal_gauge_fix(sph, cp, grid)
    assert "identity" in spot.gauge_tag
    assert np.max(np.abs(spot.a3_residual)) < 1e-14
    th = grid.coords(0)[:, None]
    assert np.allclose(spot.a2, 0.5 * 0.5 * np.sin(th) ** 2 * np.ones(grid.shape),
                       atol=1e-12)
    assert np.allclose(spot.a1, 0.0, atol=1e-12)
    # face samples equal the closed form at the face coordinates
    assert np.allclose(
        spot.a2_face, 0.5 * 0.5 * np.sin(th) ** 2 * np.ones(grid.shape), atol=1e-12
    )


def test_cylinder_paper_component_via_landau_gauge():
    """The gauge reproducing the paper's (A_th, A_y) = (r^2 B0/2, r B1 sin th)
    is axial-B0 symmetric plus transverse-B1 landau-x."""
    r, length, b0, b1 = 1.0, 4.0, 0.5, 0.3
    cyl = cq.cylinder(r, length)
    grid = cq.build_grid(cyl, 12, 12)
    cp = cq.uniform_field_potential([0, b0, 0], "symmetric") + cq.uniform_field_potential(
        [0, 0, b1], "landau-x"
    )
    spot = cq.normal_gauge_fix(cyl, cp, grid)
    th = grid.coords(0)[:, None]
    assert np.allclose(spot.a1, 0.5 * r**2 * b0, atol=1e-12)
    assert np.allclose(spot.a2, r * b1 * np.sin(th) * np.ones(grid.shape), atol=1e-12)
    assert np.max(np.abs(spot.a3_residual)) < 1e-12


def test_periodicity_violation_rejected():
    """A chart declared periodic whose map does not actually close gives a
    multivalued pullback, which the gauge fix must refuse."""
    helix = cq.from_map(
        lambda th, y: (np.cos(th), np.sin(th), y + 0.3 * th),
        domain=((0.0, 2 * np.pi), (0.0, 2.0)),
        periodic=(True, False),
        name="helix",
    )
    grid = cq.build_grid(helix, 8, 8)
    cp = cq.uniform_field_potential([1.0, 0, 0], "symmetric")
    with pytest.raises(PeriodicityViolation):
        cq.normal_gauge_fix(helix, cp, grid)


def test_apply_surface_gauge_linear():
    pl = cq.plane(1.0, 1.0)
    grid = cq.build_grid(pl, 10, 10)
    spot = cq.SurfacePotential.zeros(grid)
    out = cq.apply_surface_gauge(spot, lambda q1, q2: 0.7 * q1, grid)
    assert np.allclose(out.a1, 0.7, atol=1e-12)
    assert np.allclose(out.a2, 0.0, atol=1e-12)
    assert np.allclose(out.a1_face[1:-1], 0.7, atol=1e-12)
    const = cq.apply_surface_gauge(spot, lambda q1, q2: 1.25, grid)
    assert np.allclose(const.a1, 0.0, atol=1e-14)
    assert np.allclose(const.a2, 0.0, atol=1e-14)


def test_apply_surface_gauge_difference_matches_gradient():
    """Two gauges of the same cylinder field differ by a single-valued gamma;
    the a_a difference equals the finite-difference gradient of gamma."""
    r, b1 = 1.0, 0.4
    cyl = cq.cylinder(r, 3.0)
    grid = cq.build_grid(cyl, 24, 24)
    sym = cq.normal_gauge_fix(
        cyl, cq.uniform_field_potential([0, 0, b1], "symmetric"), grid
    )
    lan = cq.normal_gauge_fix(
        cyl, cq.uniform_field_potential([0, 0, b1], "landau-x"), grid
    )
    th, y = grid.meshgrid()

    def gamma(t, yy):
        return 0.5 * b1 * r * np.sin(t) * yy

    eps = 1e-6
    d1 = (gamma(th + eps, y) - gamma(th - eps, y)) / (2 * eps)
    d2 = (gamma(th, y + eps) - gamma(th, y - eps)) / (2 * eps)
    assert np.allclose(lan.a1 - sym.a1, d1, atol=1e-8 * max(1, b1))
    assert np.allclose(lan.a2 - sym.a2, d2, atol=1e-8 * max(1, b1))


def test_multivalued_gamma_rejected():
    tor = cq.torus(2.0, 1.0)
    grid = cq.build_grid(tor, 8, 8)
    spot = cq.SurfacePotential.zeros(grid)
    with pytest.raises(PeriodicityViolation):
        cq.apply_surface_gauge(spot, lambda th, ph: 0.3 * th, grid)


def test_gauge_transform_preserves_spectrum_exactly():
    """Lattice gauge transform: identical spectra to solver precision."""
    cyl = cq.cylinder(1.0, 3.0)
    grid = cq.build_grid(cyl, 12, 12, bc=(None, "dirichlet"))
    geo = cq.sample_geometry(cyl, grid)
    params = cq.PhysicalParams()
    spot = cq.normal_gauge_fix(
        cyl, cq.uniform_field_potential([0, 0, 0.5], "symmetric"), grid
    )
    spot2 = cq.apply_surface_gauge(
        spot, lambda th, y: np.sin(th) * y**2 - 0.2 * y, grid
    )
    e1 = cq.eigensolve_lowest(
        cq.assemble_surface_hamiltonian(geo, spot, params), 4
    ).eigenvalues
    e2 = cq.eigensolve_lowest(
        cq.assemble_surface_hamiltonian(geo, spot2, params), 4
    ).eigenvalues
    assert np.max(np.abs(e1 - e2)) < 1e-11
