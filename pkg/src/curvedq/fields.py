"""Electromagnetic potentials on and around a surface.

Cartesian four-potentials for uniform fields, their pullback to adapted
coordinates, the normal-gauge fix that removes the A3 component, and
surface gauge transformations.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.integrate import quad

from .charts import SurfaceChart
from .errors import PeriodicityViolation, QuadratureFailure
from .geometry import weingarten_at
from .grid import Grid2D, face_array_shape, face_difference, face_points

PERIODICITY_TOL = 1e-12


@dataclass(frozen=True)
class CartesianPotential:
    """Vector potential A(x) and scalar potential V(x) in Cartesian space."""

    a_fn: Callable[[np.ndarray], np.ndarray]
    v_fn: Callable[[np.ndarray], float] = lambda x: 0.0
    b_label: Optional[np.ndarray] = None

    def __add__(self, other: "CartesianPotential") -> "CartesianPotential":
        b = None
        if self.b_label is not None and other.b_label is not None:
            b = np.asarray(self.b_label) + np.asarray(other.b_label)
        return CartesianPotential(
            a_fn=lambda x, a=self.a_fn, b_=other.a_fn: a(x) + b_(x),
            v_fn=lambda x, a=self.v_fn, b_=other.v_fn: a(x) + b_(x),
            b_label=b,
        )


@dataclass
class SurfacePotential:
    """Covariant potential components sampled on a grid at q3 = 0.

    a1_face / a2_face hold the same covariant components evaluated at the
    flux-face midpoints; the discretization builds its link phases from
    them.  When absent, assembly falls back to arithmetic face averages of
    the node values.
    """

    a1: np.ndarray           # (n1, n2) covariant A_1
    a2: np.ndarray           # (n1, n2) covariant A_2
    v: np.ndarray            # (n1, n2) scalar potential
    a3_residual: np.ndarray  # A3 at q3=0 before the gauge fix (diagnostic)
    gauge_tag: str = "normal-gauge"
    a1_face: Optional[np.ndarray] = None   # A_1 at axis-0 faces
    a2_face: Optional[np.ndarray] = None   # A_2 at axis-1 faces

    @classmethod
    def zeros(cls, grid: Grid2D, gauge_tag: str = "zero") -> "SurfacePotential":
        shape = (grid.n1, grid.n2)
        return cls(
            a1=np.zeros(shape), a2=np.zeros(shape), v=np.zeros(shape),
            a3_residual=np.zeros(shape), gauge_tag=gauge_tag,
            a1_face=np.zeros(face_array_shape(grid, 0)),
            a2_face=np.zeros(face_array_shape(grid, 1)),
        )


_AXES = {"x": np.array([1.0, 0.0, 0.0]),
         "y": np.array([0.0, 1.0, 0.0]),
         "z": np.array([0.0, 0.0, 1.0])}


def uniform_field_potential(B, gauge: str = "symmetric") -> CartesianPotential:
    """Cartesian vector potential of a uniform field B.

    gauge: "symmetric" gives A = B x r / 2; "landau-<axis>" gives the linear
    gauge A = (B x u)(u . x) with u the named axis, valid when B . u = 0.
    """
    B = np.asarray(B, dtype=float)
    if gauge == "symmetric":
        return CartesianPotential(
            a_fn=lambda x: 0.5 * np.cross(B, x), b_label=B.copy()
        )
    if gauge.startswith("landau-"):
        u = _AXES.get(gauge[len("landau-"):])
        if u is None:
            raise ValueError(f"unknown landau axis in gauge {gauge!r}")
        if abs(B @ u) > 1e-12 * max(1.0, np.linalg.norm(B)):
            raise ValueError(f"{gauge} gauge needs B perpendicular to {gauge[-1]}")
        bu = np.cross(B, u)
        return CartesianPotential(
            a_fn=lambda x: bu * (u @ x), b_label=B.copy()
        )
    raise ValueError(f"unknown gauge {gauge!r}")


def pullback_potential(
    chart: SurfaceChart,
    cp: CartesianPotential,
    q: Tuple[float, float],
    q3: float = 0.0,
) -> Tuple[float, float, float]:
    """Covariant components (A1, A2, A3) at offset q3 along the normal.

    A_a = A(R) . d_a R with R = r + q3 n and d_a n from the Weingarten map.
    """
    q1, q2 = q
    gp = weingarten_at(chart, q)
    t1 = np.asarray(chart.d1(q1, q2), dtype=float)
    t2 = np.asarray(chart.d2(q1, q2), dtype=float)
    r3 = np.asarray(chart.map(q1, q2), dtype=float) + q3 * gp.normal
    a_vec = np.asarray(cp.a_fn(r3), dtype=float)
    if q3 == 0.0:
        e1, e2 = t1, t2
    else:
        # d_a n = (alpha^T)_a^b d_b r (Weingarten sign convention of geometry)
        al = gp.alpha
        e1 = t1 + q3 * (al[0, 0] * t1 + al[1, 0] * t2)
        e2 = t2 + q3 * (al[0, 1] * t1 + al[1, 1] * t2)
    return float(a_vec @ e1), float(a_vec @ e2), float(a_vec @ gp.normal)


def normal_gauge_gamma(
    chart: SurfaceChart,
    cp: CartesianPotential,
    q: Tuple[float, float],
    q3: float,
    abs_tol: float = 1e-10,
) -> float:
    """Gauge function gamma = -integral_0^q3 A3(q1, q2, z) dz."""

    def integrand(z):
        a3 = pullback_potential(chart, cp, q, z)[2]
        if not np.isfinite(a3):
            raise QuadratureFailure(f"non-finite A3 at q={q}, z={z}")
        return a3

    val, _ = quad(integrand, 0.0, q3, epsabs=abs_tol, epsrel=0.0, limit=200)
    return -float(val)


def _check_potential_periodicity(chart, cp, grid) -> None:
    """Reject potentials that are not single-valued on periodic axes."""
    for axis in (0, 1):
        if not chart.periodic[axis]:
            continue
        lo, hi = chart.domain[axis]
        other = grid.coords(1 - axis)
        probes = other[:: max(1, len(other) // 4)]
        for s in probes:
            q_lo = (lo, s) if axis == 0 else (s, lo)
            q_hi = (hi, s) if axis == 0 else (s, hi)
            p_lo = np.array(pullback_potential(chart, cp, q_lo))
            p_hi = np.array(pullback_potential(chart, cp, q_hi))
            r_lo = np.asarray(chart.map(*q_lo), dtype=float)
            v_diff = abs(cp.v_fn(r_lo) - cp.v_fn(np.asarray(chart.map(*q_hi), dtype=float)))
            scale = max(1.0, float(np.max(np.abs(p_lo))))
            if np.max(np.abs(p_lo - p_hi)) > PERIODICITY_TOL * scale or v_diff > PERIODICITY_TOL * scale:
                raise PeriodicityViolation(
                    f"{chart.name}: potential not periodic along axis {axis + 1}"
                )


def normal_gauge_fix(
    chart: SurfaceChart, cp: CartesianPotential, grid: Grid2D
) -> SurfacePotential:
    """Surface potential in the normal gauge (dynamical A3 identically zero).

    The gauge function -integral_0^q3 A3 dz vanishes at q3 = 0 together with
    its tangential gradient, so the stored a1, a2, v are the raw pullback
    restricted to the surface; the pre-fix A3 is kept as a diagnostic.
    """
    _check_potential_periodicity(chart, cp, grid)
    shape = (grid.n1, grid.n2)
    a1 = np.empty(shape)
    a2 = np.empty(shape)
    a3 = np.empty(shape)
    v = np.empty(shape)
    for i, q1 in enumerate(grid.coords(0)):
        for j, q2 in enumerate(grid.coords(1)):
            a1[i, j], a2[i, j], a3[i, j] = pullback_potential(chart, cp, (q1, q2))
            v[i, j] = cp.v_fn(np.asarray(chart.map(q1, q2), dtype=float))

    # exact covariant components at the flux-face midpoints
    faces = []
    for axis in (0, 1):
        other = grid.coords(1 - axis)
        F = np.zeros(face_array_shape(grid, axis))
        for k, qf, skip in face_points(grid, axis):
            if skip:
                continue
            for j, qo in enumerate(other):
                q = (qf, qo) if axis == 0 else (qo, qf)
                idx = (k, j) if axis == 0 else (j, k)
                F[idx] = pullback_potential(chart, cp, q)[axis]
        faces.append(F)

    tag = "normal-gauge"
    if np.max(np.abs(a3)) <= 1e-14 * max(1.0, np.max(np.abs(a1)), np.max(np.abs(a2))):
        tag = "normal-gauge (identity fix, A3 already zero)"
    return SurfacePotential(
        a1=a1, a2=a2, v=v, a3_residual=a3, gauge_tag=tag,
        a1_face=faces[0], a2_face=faces[1],
    )


GammaField = Union[np.ndarray, Callable[[float, float], float]]


def apply_surface_gauge(
    sp: SurfacePotential, gamma: GammaField, grid: Grid2D, chart: SurfaceChart = None
) -> SurfacePotential:
    """Gauge transform a_a -> a_a + d_a gamma on the grid.

    The paired wavefunction transform is psi -> psi * exp(i Q gamma / hbar).
    gamma may be a callable (checked for single-valuedness on periodic axes)
    or a node array (taken as-is, wrap-around differences on periodic axes).

    Node components get the central-difference gradient; the face
    components get the across-face difference (gamma_{i+1} - gamma_i)/h,
    which makes the transformed link phases an exact lattice gauge
    transformation: spectra are preserved to solver precision.
    """
    if callable(gamma):
        for axis in (0, 1):
            if grid.bc[axis] == "periodic":
                lo, hi = grid.domain[axis]
                for s in grid.coords(1 - axis)[:: max(1, grid.shape[1 - axis] // 4)]:
                    args_lo = (lo, s) if axis == 0 else (s, lo)
                    args_hi = (hi, s) if axis == 0 else (s, hi)
                    g_lo, g_hi = gamma(*args_lo), gamma(*args_hi)
                    if abs(g_lo - g_hi) > PERIODICITY_TOL * max(1.0, abs(g_lo)):
                        raise PeriodicityViolation(
                            f"gauge function multivalued along axis {axis + 1}"
                        )
        q1s, q2s = grid.coords(0), grid.coords(1)
        gamma_arr = np.array([[gamma(a, b) for b in q2s] for a in q1s])
    else:
        gamma_arr = np.asarray(gamma, dtype=float)
        if gamma_arr.shape != grid.shape:
            raise ValueError(f"gamma shape {gamma_arr.shape} != grid {grid.shape}")
    d1 = grid.gradient(gamma_arr, axis=0)
    d2 = grid.gradient(gamma_arr, axis=1)
    f1 = sp.a1_face + face_difference(grid, 0, gamma_arr) if sp.a1_face is not None else None
    f2 = sp.a2_face + face_difference(grid, 1, gamma_arr) if sp.a2_face is not None else None
    return replace(
        sp, a1=sp.a1 + d1, a2=sp.a2 + d2, a1_face=f1, a2_face=f2,
        gauge_tag=sp.gauge_tag + " + surface gauge",
    )
