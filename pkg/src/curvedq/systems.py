"""Hard-coded reference Hamiltonians for sphere, cylinder and torus.

Coefficients are transcribed from the closed-form surface equations of the
three geometries (uniform field; polar axis along B for the sphere, B0
axial + B1 transverse for the cylinder, B0 out of plane + B1 in plane for
the torus): the metric factors sqrt(g) g^{aa}, the covariant potential
components A_a whose first-order and quadratic field terms those equations
spell out, and the scalar geometric term, all as closed-form expressions
evaluated at the exact node/face coordinates.  They feed the same Hermitian
link-phase stencil machinery as the generic assembler, so agreement with it
is elementwise, not merely spectral, and an integer Aharonov-Bohm flux is
an exact lattice gauge transform of zero flux.

The closed-form / 1D-reduced oracle spectra live here as well; the 1D
reduction uses an independent dense non-conservative discretization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .grid import Grid2D
from .operators import HamiltonianOperator, PhysicalParams, assemble_covariant


@dataclass(frozen=True)
class SystemSpec:
    """Reference geometry + uniform-field parameters."""

    kind: str                      # sphere | cylinder | torus
    r: float = 1.0                 # sphere/cylinder/torus tube radius
    big_r: float = 2.0             # torus centre distance R
    length: float = 1.0            # cylinder length
    b: float = 0.0                 # sphere polar field
    b0: float = 0.0                # cylinder axial / torus out-of-plane
    b1: float = 0.0                # cylinder transverse / torus in-plane
    y_periodic: bool = True
    params: PhysicalParams = field(default_factory=PhysicalParams)

    def __post_init__(self):
        if self.r <= 0.0:
            raise ValueError("radius must be positive")
        if self.kind == "torus" and not self.big_r > self.r:
            raise ValueError("ring torus requires R > r")


def reference_sphere_hamiltonian(spec: SystemSpec, grid: Grid2D) -> HamiltonianOperator:
    """Sphere of radius r, field B along the polar axis; V_S = 0.

    Operator: (1/2m)[-(hbar^2/r^2)((1/sin)d_th(sin d_th) + (1/sin^2)d_ph^2)
    + i Q hbar B d_ph + (Q^2 B^2 r^2 /4) sin^2(th)].
    """
    r, b = spec.r, spec.b
    th = grid.coords(0)[:, None]
    ph_n = grid.n2
    sqrt_g = np.broadcast_to(r**2 * np.sin(th), grid.shape).copy()

    # theta flux faces: sqrt(g) g^{theta theta} = sin(theta); 0 at the poles
    th_faces = np.concatenate(([grid.axes[0].lo], grid.axes[0].plus_faces))
    f_th = np.broadcast_to(np.sin(th_faces)[:, None], (grid.n1 + 1, ph_n)).copy()
    f_th[0, :] = 0.0
    f_th[-1, :] = 0.0
    # phi faces: sqrt(g) g^{phi phi} = 1/sin(theta), phi-independent
    f_ph = np.broadcast_to(1.0 / np.sin(th), grid.shape).copy()

    # i Q hbar B d_phi and (Q^2 B^2 r^2/4) sin^2 both encode the covariant
    # A_phi = (B r^2/2) sin^2(theta); A_theta = 0
    a_th = np.zeros((grid.n1 + 1, ph_n))
    a_ph = np.broadcast_to(0.5 * b * r**2 * np.sin(th) ** 2, grid.shape).copy()

    diag = np.zeros(grid.shape)
    return assemble_covariant(
        grid, sqrt_g=sqrt_g, face_coef=[f_th, f_ph], a_face=[a_th, a_ph],
        diag_pot=diag, params=spec.params, provenance="reference-sphere",
    )


def reference_cylinder_hamiltonian(spec: SystemSpec, grid: Grid2D) -> HamiltonianOperator:
    """Cylinder of radius r with axial B0 and transverse B1.

    Operator: (1/2m)[-hbar^2((1/r^2)d_th^2 + d_y^2) + i Q hbar B0 d_th
    + 2 i Q hbar r B1 sin(th) d_y + Q^2 r^2 (B0^2/4 + B1^2 sin^2 th)]
    - hbar^2/(8 m r^2).
    """
    r, b0, b1 = spec.r, spec.b0, spec.b1
    hbar, mass = spec.params.hbar, spec.params.mass
    th = grid.coords(0)[:, None]
    sqrt_g = np.full(grid.shape, r)

    f_th = np.full(_face_shape(grid, 0), 1.0 / r)
    f_y = np.full(_face_shape(grid, 1), r)

    # the i Q hbar B0 d_th, 2 i Q hbar r B1 sin d_y and Q^2 terms encode
    # the covariant A_theta = r^2 B0 / 2, A_y = r B1 sin(theta)
    a_th = np.full(_face_shape(grid, 0), 0.5 * r**2 * b0)
    a_y = np.broadcast_to(r * b1 * np.sin(th), _face_shape(grid, 1)).copy()

    diag = np.full(grid.shape, -hbar**2 / (8.0 * mass * r**2))
    return assemble_covariant(
        grid, sqrt_g=sqrt_g, face_coef=[f_th, f_y], a_face=[a_th, a_y],
        diag_pot=diag, params=spec.params, provenance="reference-cylinder",
    )


def reference_torus_hamiltonian(spec: SystemSpec, grid: Grid2D) -> HamiltonianOperator:
    """Torus (R, r) with out-of-plane B0 and in-plane B1; W = R + r cos(th).

    The geometric term -(hbar R/(2rW))^2/2m is transcribed directly; the
    first-order and quadratic field terms are carried by the covariant
    A_theta = B1 r sin(phi)(R cos th + r)/2 and
    A_phi = W (B0 W - B1 r sin th cos ph)/2 that they encode (the
    zeroth-order i-term is the divergence of the same current).
    """
    r, big_r, b0, b1 = spec.r, spec.big_r, spec.b0, spec.b1
    hbar, mass = spec.params.hbar, spec.params.mass
    th = grid.coords(0)[:, None]
    ph = grid.coords(1)[None, :]
    w = big_r + r * np.cos(th)
    sqrt_g = np.broadcast_to(r * w, grid.shape).copy()

    th_faces = grid.axes[0].plus_faces[:, None]
    w_faces = big_r + r * np.cos(th_faces)
    ph_faces = grid.axes[1].plus_faces[None, :]
    f_th = np.broadcast_to(w_faces / r, (grid.n1, grid.n2)).copy()
    f_ph = np.broadcast_to(r / w, grid.shape).copy()

    a_th = (
        0.5 * b1 * r * np.sin(ph) * (big_r * np.cos(th_faces) + r)
    ) * np.ones(grid.shape)
    a_ph = (
        0.5 * w * (b0 * w - b1 * r * np.sin(th) * np.cos(ph_faces))
    ) * np.ones(grid.shape)

    diag = (
        -(hbar**2 / (2.0 * mass)) * (big_r / (2.0 * r * w)) ** 2
    ) * np.ones(grid.shape)
    return assemble_covariant(
        grid, sqrt_g=sqrt_g, face_coef=[f_th, f_ph], a_face=[a_th, a_ph],
        diag_pot=diag, params=spec.params, provenance="reference-torus",
    )


def _face_shape(grid: Grid2D, axis: int):
    n_face = grid.axes[axis].n if grid.axes[axis].bc == "periodic" else grid.axes[axis].n + 1
    return (n_face, grid.n2) if axis == 0 else (grid.n1, n_face)


def flux_ratio(spec: SystemSpec) -> float:
    """Aharonov-Bohm flux through the cylinder in units of 2 pi hbar / Q."""
    phi = spec.b0 * np.pi * spec.r**2
    phi0 = 2.0 * np.pi * spec.params.hbar / spec.params.charge
    return float(phi / phi0)


def cylinder_closed_form(
    spec: SystemSpec, count: int, n_max: int = 24, k_max: int = 24
) -> np.ndarray:
    """E(n, k) = hbar^2 (n - nu)^2 / 2 m r^2 + hbar^2 k^2 / 2m - hbar^2/8 m r^2."""
    hbar, mass = spec.params.hbar, spec.params.mass
    r, length = spec.r, spec.length
    nu = flux_ratio(spec)
    levels = []
    for n in range(-n_max, n_max + 1):
        for j in range(-k_max, k_max + 1):
            if spec.y_periodic:
                k = 2.0 * np.pi * j / length
            else:
                if j < 1:
                    continue
                k = np.pi * j / length
            levels.append(
                hbar**2 * (n - nu) ** 2 / (2.0 * mass * r**2)
                + hbar**2 * k**2 / (2.0 * mass)
                - hbar**2 / (8.0 * mass * r**2)
            )
    return np.sort(np.asarray(levels))[:count]


def sphere_closed_form(spec: SystemSpec, count: int) -> np.ndarray:
    """Free-sphere spectrum l(l+1) hbar^2 / 2 m r^2 with degeneracy 2l+1."""
    if spec.b != 0.0:
        raise ValueError("closed form available only for B = 0")
    hbar, mass, r = spec.params.hbar, spec.params.mass, spec.r
    levels = []
    l = 0
    while len(levels) < count:
        levels.extend([l * (l + 1) * hbar**2 / (2.0 * mass * r**2)] * (2 * l + 1))
        l += 1
    return np.asarray(levels[:count])


def torus_axisymmetric_oracle(
    spec: SystemSpec, count: int, n_theta: int = 512, l_max: int = 14
) -> np.ndarray:
    """Low-lying torus spectrum for B1 = 0 from per-l 1D theta operators.

    Independent route: node-centered theta grid and plain (non-conservative)
    central differences, solved densely; the 2D flux-form solver never sees
    this code path.
    """
    if spec.b1 != 0.0:
        raise ValueError("1D reduction requires B1 = 0 (phi separability)")
    hbar, mass, charge = spec.params.hbar, spec.params.mass, spec.params.charge
    r, big_r, b0 = spec.r, spec.big_r, spec.b0
    h = 2.0 * np.pi / n_theta
    th = np.arange(n_theta) * h
    w = big_r + r * np.cos(th)

    eye = np.eye(n_theta)
    d1 = (np.roll(eye, 1, axis=1) - np.roll(eye, -1, axis=1)) / (2.0 * h)
    d2 = (np.roll(eye, -1, axis=1) - 2.0 * eye + np.roll(eye, 1, axis=1)) / h**2

    levels = []
    for l in range(-l_max, l_max + 1):
        t = (
            -(hbar**2 / r**2) * d2
            + (hbar**2 * np.sin(th) / (r * w))[:, None] * d1
            + np.diag(
                hbar**2 * l**2 / w**2
                - (hbar * big_r / (2.0 * r * w)) ** 2
                - charge * hbar * b0 * l
                + 0.25 * charge**2 * (b0 * w) ** 2
            )
        ) / (2.0 * mass)
        vals = sla.eig(t, right=False)
        assert np.max(np.abs(vals.imag)) < 1e-8 * max(1.0, np.max(np.abs(vals.real)))
        levels.extend(np.sort(vals.real)[: count].tolist())
    return np.sort(np.asarray(levels))[:count]


def oracle_spectra(spec: SystemSpec, count: int = 10) -> np.ndarray:
    """Independent low-lying spectrum for the reference systems."""
    if spec.kind == "sphere":
        return sphere_closed_form(spec, count)
    if spec.kind == "cylinder":
        return cylinder_closed_form(spec, count)
    if spec.kind == "torus":
        return torus_axisymmetric_oracle(spec, count)
    raise ValueError(f"unknown system kind {spec.kind!r}")
