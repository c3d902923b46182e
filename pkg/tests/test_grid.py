"""Cell-centered grids, boundary-condition defaults and face utilities."""

import numpy as np
import pytest

import curvedq as cq
from curvedq.errors import BadResolution
from curvedq.grid import Axis, face_points


def test_axis_cell_centering():
    ax = Axis(n=4, lo=0.0, hi=2.0, bc="dirichlet")
    assert ax.h == 0.5
    assert np.allclose(ax.coords, [0.25, 0.75, 1.25, 1.75])
    assert np.allclose(ax.plus_faces, [0.5, 1.0, 1.5, 2.0])
    with pytest.raises(ValueError):
        Axis(n=4, lo=0.0, hi=1.0, bc="reflecting")


def test_default_boundary_conditions():
    # sphere: theta closes at both poles, phi periodic
    g = cq.build_grid(cq.sphere(1.0), 8, 8)
    assert g.bc == ("zero-flux", "periodic")
    # cylinder: theta periodic, y open
    g = cq.build_grid(cq.cylinder(1.0, 2.0), 8, 8)
    assert g.bc == ("periodic", "dirichlet")
    # torus: both periodic
    g = cq.build_grid(cq.torus(2.0, 1.0), 8, 8)
    assert g.bc == ("periodic", "periodic")
    # explicit override wins
    g = cq.build_grid(cq.cylinder(1.0, 2.0), 8, 8, bc=(None, "periodic"))
    assert g.bc == ("periodic", "periodic")


def test_no_node_on_pole():
    g = cq.build_grid(cq.sphere(1.0), 16, 16)
    th = g.coords(0)
    assert np.all(np.sin(th) > 1e-3)


def test_min_resolution():
    with pytest.raises(BadResolution):
        cq.build_grid(cq.sphere(1.0), 3, 16)


def test_gradient_periodic_and_open():
    g = cq.build_grid(cq.torus(2.0, 1.0), 32, 32)
    th, ph = g.meshgrid()
    d = g.gradient(np.sin(th), axis=0)
    # second-order central differences: error <= h^2/6 for sin
    assert np.allclose(d, np.cos(th), atol=(g.h1**2) / 6 * 1.01)
    gp = cq.build_grid(cq.plane(1.0, 1.0), 32, 32)
    x, y = gp.meshgrid()
    d = gp.gradient(x**2, axis=0)
    assert np.allclose(d, 2 * x, atol=1e-10)


def test_face_array_shapes():
    g = cq.build_grid(cq.cylinder(1.0, 2.0), 8, 6)
    assert cq.face_array_shape(g, 0) == (8, 6)      # periodic theta
    assert cq.face_array_shape(g, 1) == (8, 7)      # open y: n+1 faces
    skips = [skip for _, _, skip in face_points(g, 1)]
    assert not any(skips)
    gs = cq.build_grid(cq.sphere(1.0), 8, 8)
    skips = [skip for _, _, skip in face_points(gs, 0)]
    assert skips[0] and skips[-1] and not any(skips[1:-1])


def test_average_to_faces_periodic():
    g = cq.build_grid(cq.torus(2.0, 1.0), 8, 8)
    vals = np.arange(64, dtype=float).reshape(8, 8)
    f = cq.average_to_faces(g, 1, vals)
    assert f.shape == (8, 8)
    assert f[0, 0] == pytest.approx(0.5 * (vals[0, 0] + vals[0, 1]))
    assert f[0, 7] == pytest.approx(0.5 * (vals[0, 7] + vals[0, 0]))


def test_average_to_faces_zero_flux_boundary():
    g = cq.build_grid(cq.sphere(1.0), 8, 8)
    f = cq.average_to_faces(g, 0, np.ones((8, 8)))
    assert f.shape == (9, 8)
    assert np.all(f[0] == 0.0) and np.all(f[-1] == 0.0)
    assert np.all(f[1:-1] == 1.0)


def test_face_difference_is_discrete_gradient():
    """Telescoping: summing face differences around a periodic axis gives 0,
    and the difference of a linear function is its slope exactly."""
    g = cq.build_grid(cq.torus(2.0, 1.0), 16, 16)
    rng = np.random.RandomState(2)
    vals = rng.standard_normal((16, 16))
    d = cq.face_difference(g, 0, vals)
    assert np.allclose(d.sum(axis=0) * g.h1, 0.0, atol=1e-12)
    gp = cq.build_grid(cq.plane(1.0, 1.0), 8, 8)
    x, y = gp.meshgrid()
    d = cq.face_difference(gp, 0, 3.0 * x)
    assert np.allclose(d[1:-1], 3.0, atol=1e-12)
    assert np.all(d[0] == 0.0) and np.all(d[-1] == 0.0)
