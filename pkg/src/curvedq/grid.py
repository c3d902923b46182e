"""Structured cell-centered grids on chart domains.

Nodes sit at cell centers, so no node ever lies on a coordinate
singularity (e.g. the sphere poles).  Boundary conditions per axis:
"periodic", "dirichlet" (zero beyond the boundary) or "zero-flux"
(no flux through the boundary faces; exact at poles where the area
density vanishes).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .charts import SurfaceChart
from .errors import BadResolution

BCS = ("periodic", "dirichlet", "zero-flux")


@dataclass(frozen=True)
class Axis:
    """One grid axis: n cells over [lo, hi] with a boundary condition."""

    n: int
    lo: float
    hi: float
    bc: str

    def __post_init__(self):
        if self.bc not in BCS:
            raise ValueError(f"unknown bc {self.bc!r}")

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / self.n

    @property
    def coords(self) -> np.ndarray:
        return self.lo + (np.arange(self.n) + 0.5) * self.h

    @property
    def plus_faces(self) -> np.ndarray:
        """Coordinate of the face between node i and node i+1."""
        return self.lo + (np.arange(self.n) + 1.0) * self.h

    @property
    def minus_faces(self) -> np.ndarray:
        """Coordinate of the face between node i-1 and node i."""
        return self.lo + np.arange(self.n) * self.h


@dataclass(frozen=True)
class GridND:
    """Cartesian product of axes; supports d = 2 and d = 3 assembly."""

    axes: Tuple[Axis, ...]

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(ax.n for ax in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def bc(self) -> Tuple[str, ...]:
        return tuple(ax.bc for ax in self.axes)

    @property
    def domain(self) -> Tuple[Tuple[float, float], ...]:
        return tuple((ax.lo, ax.hi) for ax in self.axes)

    @property
    def cell_volume(self) -> float:
        return float(np.prod([ax.h for ax in self.axes]))

    def coords(self, axis: int) -> np.ndarray:
        return self.axes[axis].coords

    def meshgrid(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*(ax.coords for ax in self.axes), indexing="ij"))

    def gradient(self, f: np.ndarray, axis: int) -> np.ndarray:
        """Central differences; wrap-around on periodic axes."""
        ax = self.axes[axis]
        if ax.bc == "periodic":
            return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2.0 * ax.h)
        return np.gradient(f, ax.h, axis=axis, edge_order=2)


class Grid2D(GridND):
    """Two-axis grid with named accessors for surface work."""

    def __init__(self, axis1: Axis, axis2: Axis):
        super().__init__(axes=(axis1, axis2))

    @property
    def n1(self) -> int:
        return self.axes[0].n

    @property
    def n2(self) -> int:
        return self.axes[1].n

    @property
    def h1(self) -> float:
        return self.axes[0].h

    @property
    def h2(self) -> float:
        return self.axes[1].h


def face_array_shape(grid: GridND, axis: int) -> Tuple[int, ...]:
    """Shape of a per-face array along an axis (n faces periodic, n+1 else)."""
    shape = list(grid.shape)
    if grid.axes[axis].bc != "periodic":
        shape[axis] += 1
    return tuple(shape)


def face_points(grid: GridND, axis: int):
    """Iterate (index, face_coordinate, skip) over the axis faces.

    skip marks the boundary faces of a zero-flux axis, whose coupling
    coefficient is zero by construction (pole-like chart closure).
    """
    ax = grid.axes[axis]
    if ax.bc == "periodic":
        faces = ax.plus_faces
    else:
        faces = np.concatenate(([ax.lo], ax.plus_faces))
    last = len(faces) - 1
    for k, qf in enumerate(faces):
        skip = ax.bc == "zero-flux" and (k == 0 or k == last)
        yield k, float(qf), skip


def average_to_faces(grid: GridND, axis: int, node_vals: np.ndarray) -> np.ndarray:
    """Arithmetic face average of a node array; zero on zero-flux boundaries."""
    ax = grid.axes[axis]
    if ax.bc == "periodic":
        return 0.5 * (node_vals + np.roll(node_vals, -1, axis=axis))
    pads = [(0, 0)] * grid.ndim
    pads[axis] = (1, 1)
    padded = np.pad(node_vals, pads, mode="edge")
    lo = [slice(None)] * grid.ndim
    hi = [slice(None)] * grid.ndim
    lo[axis] = slice(0, ax.n + 1)
    hi[axis] = slice(1, ax.n + 2)
    faces = 0.5 * (padded[tuple(lo)] + padded[tuple(hi)])
    if ax.bc == "zero-flux":
        edge = [slice(None)] * grid.ndim
        edge[axis] = 0
        faces[tuple(edge)] = 0.0
        edge[axis] = ax.n
        faces[tuple(edge)] = 0.0
    return faces


def face_difference(grid: GridND, axis: int, node_vals: np.ndarray) -> np.ndarray:
    """Across-face difference (f_{i+1} - f_i)/h as a per-face array.

    This is the discrete gradient conjugate to the link phases: adding
    face_difference(gamma) to a face potential is an exact lattice gauge
    transformation.  Boundary faces (where no hop exists) are set to zero.
    """
    ax = grid.axes[axis]
    if ax.bc == "periodic":
        return (np.roll(node_vals, -1, axis=axis) - node_vals) / ax.h
    out = np.zeros(face_array_shape(grid, axis))
    lo = [slice(None)] * grid.ndim
    hi = [slice(None)] * grid.ndim
    mid = [slice(None)] * grid.ndim
    lo[axis] = slice(0, ax.n - 1)
    hi[axis] = slice(1, ax.n)
    mid[axis] = slice(1, ax.n)
    out[tuple(mid)] = (node_vals[tuple(hi)] - node_vals[tuple(lo)]) / ax.h
    return out


def _singular_boundary(chart: SurfaceChart, axis: int, end: int) -> bool:
    """True when the chart degenerates at that boundary (pole-like closure)."""
    lo, hi = chart.domain[axis]
    q_b = lo if end == 0 else hi
    o_lo, o_hi = chart.domain[1 - axis]
    q_o = 0.5 * (o_lo + o_hi)
    q = (q_b, q_o) if axis == 0 else (q_o, q_b)

    def cross_mag(qq):
        t1 = np.asarray(chart.d1(*qq), dtype=float)
        t2 = np.asarray(chart.d2(*qq), dtype=float)
        return float(np.linalg.norm(np.cross(t1, t2)))

    q_mid = (0.5 * (lo + hi), q_o) if axis == 0 else (q_o, 0.5 * (lo + hi))
    return cross_mag(q) < 1e-8 * max(cross_mag(q_mid), 1e-300)


def build_grid(
    chart: SurfaceChart,
    n1: int,
    n2: int,
    bc: Optional[Sequence[Optional[str]]] = None,
) -> Grid2D:
    """Cell-centered grid respecting chart periodicity.

    Non-periodic axes default to dirichlet, except axes whose chart
    degenerates at both ends (sphere poles), which get zero-flux closure.
    Explicit bc entries override the defaults.
    """
    if n1 < 4 or n2 < 4:
        raise BadResolution(f"need n1, n2 >= 4, got {n1}x{n2}")
    axes = []
    for axis, n in ((0, n1), (1, n2)):
        lo, hi = chart.domain[axis]
        if chart.periodic[axis]:
            default = "periodic"
        elif _singular_boundary(chart, axis, 0) and _singular_boundary(chart, axis, 1):
            default = "zero-flux"
        else:
            default = "dirichlet"
        chosen = default
        if bc is not None and bc[axis] is not None:
            chosen = bc[axis]
        axes.append(Axis(n=n, lo=lo, hi=hi, bc=chosen))
    return Grid2D(axes[0], axes[1])
