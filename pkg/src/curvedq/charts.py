"""Parametrized surface charts and the built-in chart zoo.

A chart maps coordinates (q1, q2) to points of a surface embedded in R^3.
First and second partial derivatives may be supplied analytically; when
absent they are generated by central finite differences of the map.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .errors import OutOfDomain

Vec3Fn = Callable[[float, float], np.ndarray]


@dataclass(frozen=True)
class SurfaceChart:
    """Surface parametrization r(q1, q2) with derivatives and domain data."""

    map: Vec3Fn
    d1: Vec3Fn
    d2: Vec3Fn
    d11: Vec3Fn
    d12: Vec3Fn
    d22: Vec3Fn
    domain: Tuple[Tuple[float, float], Tuple[float, float]]
    periodic: Tuple[bool, bool]
    name: str = "chart"

    def span(self, axis: int) -> float:
        lo, hi = self.domain[axis]
        return hi - lo

    def check_domain(self, q1: float, q2: float) -> None:
        """Raise OutOfDomain if a non-periodic coordinate leaves its range."""
        tol = 1e-12
        for axis, q in ((0, q1), (1, q2)):
            lo, hi = self.domain[axis]
            if not self.periodic[axis] and not (lo - tol <= q <= hi + tol):
                raise OutOfDomain(
                    f"{self.name}: q{axis + 1}={q} outside [{lo}, {hi}]"
                )


def from_map(
    map_fn: Vec3Fn,
    domain: Tuple[Tuple[float, float], Tuple[float, float]],
    periodic: Tuple[bool, bool] = (False, False),
    name: str = "custom",
    rel_step: float = 1e-5,
) -> SurfaceChart:
    """Build a chart from a position function alone.

    Derivatives are second-order central differences with step
    rel_step * (domain span) per axis.  map_fn may return any length-3
    sequence; it is coerced to a float array.
    """
    h1 = rel_step * (domain[0][1] - domain[0][0])
    h2 = rel_step * (domain[1][1] - domain[1][0])
    raw_fn = map_fn

    def map_fn(q1, q2):
        return np.asarray(raw_fn(q1, q2), dtype=float)

    def d1(q1, q2):
        return (map_fn(q1 + h1, q2) - map_fn(q1 - h1, q2)) / (2.0 * h1)

    def d2(q1, q2):
        return (map_fn(q1, q2 + h2) - map_fn(q1, q2 - h2)) / (2.0 * h2)

    def d11(q1, q2):
        return (
            map_fn(q1 + h1, q2) - 2.0 * map_fn(q1, q2) + map_fn(q1 - h1, q2)
        ) / h1**2

    def d22(q1, q2):
        return (
            map_fn(q1, q2 + h2) - 2.0 * map_fn(q1, q2) + map_fn(q1, q2 - h2)
        ) / h2**2

    def d12(q1, q2):
        return (
            map_fn(q1 + h1, q2 + h2)
            - map_fn(q1 + h1, q2 - h2)
            - map_fn(q1 - h1, q2 + h2)
            + map_fn(q1 - h1, q2 - h2)
        ) / (4.0 * h1 * h2)

    return SurfaceChart(
        map=map_fn, d1=d1, d2=d2, d11=d11, d12=d12, d22=d22,
        domain=domain, periodic=periodic, name=name,
    )


def plane(lx: float = 1.0, ly: float = 1.0) -> SurfaceChart:
    """Flat sheet (q1, q2, 0) on [0, lx] x [0, ly]."""
    zero = np.zeros(3)

    return SurfaceChart(
        map=lambda q1, q2: np.array([q1, q2, 0.0]),
        d1=lambda q1, q2: np.array([1.0, 0.0, 0.0]),
        d2=lambda q1, q2: np.array([0.0, 1.0, 0.0]),
        d11=lambda q1, q2: zero,
        d12=lambda q1, q2: zero,
        d22=lambda q1, q2: zero,
        domain=((0.0, lx), (0.0, ly)),
        periodic=(False, False),
        name="plane",
    )


def sphere(r: float = 1.0) -> SurfaceChart:
    """Sphere of radius r, coordinates (theta, phi), polar axis along z."""

    def map_fn(th, ph):
        return r * np.array(
            [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)]
        )

    def d1(th, ph):
        return r * np.array(
            [np.cos(th) * np.cos(ph), np.cos(th) * np.sin(ph), -np.sin(th)]
        )

    def d2(th, ph):
        return r * np.array([-np.sin(th) * np.sin(ph), np.sin(th) * np.cos(ph), 0.0])

    def d11(th, ph):
        return -map_fn(th, ph)

    def d12(th, ph):
        return r * np.array([-np.cos(th) * np.sin(ph), np.cos(th) * np.cos(ph), 0.0])

    def d22(th, ph):
        return r * np.array([-np.sin(th) * np.cos(ph), -np.sin(th) * np.sin(ph), 0.0])

    return SurfaceChart(
        map=map_fn, d1=d1, d2=d2, d11=d11, d12=d12, d22=d22,
        domain=((0.0, np.pi), (0.0, 2.0 * np.pi)),
        periodic=(False, True),
        name="sphere",
    )


def cylinder(r: float = 1.0, length: float = 1.0) -> SurfaceChart:
    """Cylinder of radius r, axis along y, coordinates (theta, y).

    theta = 0 points along +z, so a field B1 z-hat is perpendicular to the
    axis at theta = 0.
    """
    zero = np.zeros(3)

    def map_fn(th, y):
        return np.array([r * np.sin(th), y, r * np.cos(th)])

    def d1(th, y):
        return np.array([r * np.cos(th), 0.0, -r * np.sin(th)])

    def d2(th, y):
        return np.array([0.0, 1.0, 0.0])

    def d11(th, y):
        return np.array([-r * np.sin(th), 0.0, -r * np.cos(th)])

    return SurfaceChart(
        map=map_fn, d1=d1, d2=d2, d11=d11,
        d12=lambda th, y: zero, d22=lambda th, y: zero,
        domain=((0.0, 2.0 * np.pi), (0.0, length)),
        periodic=(True, False),
        name="cylinder",
    )


def torus(big_r: float = 2.0, r: float = 1.0) -> SurfaceChart:
    """Ring torus, coordinates (theta, phi); W(theta) = R + r cos(theta).

    The torus plane is the x-y plane, so B0 z-hat is perpendicular to it
    and B1 x-hat lies in it.
    """
    if not big_r > r > 0.0:
        raise ValueError(f"ring torus requires R > r > 0, got R={big_r}, r={r}")

    def w(th):
        return big_r + r * np.cos(th)

    def map_fn(th, ph):
        return np.array([w(th) * np.cos(ph), w(th) * np.sin(ph), r * np.sin(th)])

    def d1(th, ph):
        return np.array(
            [-r * np.sin(th) * np.cos(ph), -r * np.sin(th) * np.sin(ph), r * np.cos(th)]
        )

    def d2(th, ph):
        return np.array([-w(th) * np.sin(ph), w(th) * np.cos(ph), 0.0])

    def d11(th, ph):
        return np.array(
            [-r * np.cos(th) * np.cos(ph), -r * np.cos(th) * np.sin(ph), -r * np.sin(th)]
        )

    def d12(th, ph):
        return np.array(
            [r * np.sin(th) * np.sin(ph), -r * np.sin(th) * np.cos(ph), 0.0]
        )

    def d22(th, ph):
        return np.array([-w(th) * np.cos(ph), -w(th) * np.sin(ph), 0.0])

    return SurfaceChart(
        map=map_fn, d1=d1, d2=d2, d11=d11, d12=d12, d22=d22,
        domain=((0.0, 2.0 * np.pi), (0.0, 2.0 * np.pi)),
        periodic=(True, True),
        name="torus",
    )


_BUILTIN = {"plane": plane, "sphere": sphere, "cylinder": cylinder, "torus": torus}


def builtin_chart(name: str, **params: float) -> SurfaceChart:
    """Look up a zoo chart by name with keyword parameters.

    Accepted parameters: plane(lx, ly); sphere(r); cylinder(r, length);
    torus(big_r, r).
    """
    if name not in _BUILTIN:
        raise KeyError(f"unknown builtin chart {name!r}; have {sorted(_BUILTIN)}")
    return _BUILTIN[name](**params)
