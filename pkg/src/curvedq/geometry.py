"""Differential geometry of a parametrized surface.

Induced metric, Weingarten curvature matrix, geometric potential and the
adapted 3D metric of the thin-layer construction.

Sign convention: the normal is n = (d1 x d2)/|d1 x d2| (chart-order
orientation) and the Weingarten matrix is defined through the normal
derivative, d_a n = alpha_a^b d_b r, equivalently alpha = -g^{-1} h with
h_ab = n . d_ab r.  With this choice the adapted metric of the offset
embedding R = r + q3 n is literally g + (alpha g + (alpha g)^T) q3 +
alpha g alpha^T q3^2.  The geometric potential is convention-independent;
only the sign of the mean curvature depends on the orientation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .charts import SurfaceChart
from .errors import DegenerateChart, NonPositiveFactor

DEGENERACY_TOL = 1e-12


@dataclass
class GeometryPointData:
    """Metric and curvature data of one surface point."""

    g: np.ndarray            # 2x2 induced metric
    g_inv: np.ndarray        # 2x2 inverse metric
    sqrt_g: float            # sqrt(det g), the area measure density
    normal: np.ndarray       # unit normal, chart-order orientation
    alpha: Optional[np.ndarray] = None   # 2x2 Weingarten matrix
    mean_curv: Optional[float] = None    # Tr(alpha)/2
    gauss_curv: Optional[float] = None   # det(alpha)
    v_s: Optional[float] = None          # geometric potential at hbar=m=1


@dataclass
class AdaptedMetric3D:
    """3x3 metric of the tubular neighbourhood at normal offset q3."""

    G: np.ndarray
    q3: float


def metric_at(chart: SurfaceChart, q: Tuple[float, float]) -> GeometryPointData:
    """First-fundamental-form data at a point: g, its inverse, sqrt(g), n."""
    q1, q2 = q
    chart.check_domain(q1, q2)
    t1 = np.asarray(chart.d1(q1, q2), dtype=float)
    t2 = np.asarray(chart.d2(q1, q2), dtype=float)
    cross = np.cross(t1, t2)
    cross_norm = np.linalg.norm(cross)
    tangent_scale = np.linalg.norm(t1) * np.linalg.norm(t2)
    if cross_norm < DEGENERACY_TOL * tangent_scale or tangent_scale == 0.0:
        raise DegenerateChart(f"{chart.name}: tangents parallel at q={q}")
    g = np.array([[t1 @ t1, t1 @ t2], [t1 @ t2, t2 @ t2]])
    det_g = g[0, 0] * g[1, 1] - g[0, 1] ** 2
    g_inv = np.array([[g[1, 1], -g[0, 1]], [-g[0, 1], g[0, 0]]]) / det_g
    return GeometryPointData(
        g=g, g_inv=g_inv, sqrt_g=float(np.sqrt(det_g)), normal=cross / cross_norm
    )


def weingarten_at(chart: SurfaceChart, q: Tuple[float, float]) -> GeometryPointData:
    """Complete geometry data: Weingarten matrix, curvatures, V_S (hbar=m=1)."""
    gp = metric_at(chart, q)
    q1, q2 = q
    n = gp.normal
    h = np.empty((2, 2))
    h[0, 0] = n @ np.asarray(chart.d11(q1, q2), dtype=float)
    h[0, 1] = h[1, 0] = n @ np.asarray(chart.d12(q1, q2), dtype=float)
    h[1, 1] = n @ np.asarray(chart.d22(q1, q2), dtype=float)
    alpha = -gp.g_inv @ h
    gp.alpha = alpha
    gp.mean_curv = float(np.trace(alpha)) / 2.0
    gp.gauss_curv = float(np.linalg.det(alpha))
    gp.v_s = geometric_potential(gp, mass=1.0, hbar=1.0)
    return gp


def geometric_potential(gp: GeometryPointData, mass: float, hbar: float) -> float:
    """Curvature-induced potential -(hbar^2/2m)(M^2 - K); always <= 0."""
    m2 = (np.trace(gp.alpha) / 2.0) ** 2
    return float(-(hbar**2 / (2.0 * mass)) * (m2 - np.linalg.det(gp.alpha)))


def adapted_metric_at(
    chart: SurfaceChart, q: Tuple[float, float], q3: float
) -> AdaptedMetric3D:
    """Block metric of the embedding R = r + q3 n around the surface.

    Warns (does not fail) when |q3| exceeds the focal distance 1/max|kappa|;
    the formula stays algebraically valid there.
    """
    gp = weingarten_at(chart, q)
    kappa_max = max(abs(np.linalg.eigvals(gp.alpha)))
    if kappa_max > 0.0 and abs(q3) * kappa_max > 1.0:
        warnings.warn(
            f"{chart.name}: |q3|={abs(q3)} beyond focal distance "
            f"{1.0 / kappa_max:.3g}",
            stacklevel=2,
        )
    ag = gp.alpha @ gp.g
    upper = gp.g + (ag + ag.T) * q3 + (gp.alpha @ gp.g @ gp.alpha.T) * q3**2
    G = np.zeros((3, 3))
    G[:2, :2] = upper
    G[2, 2] = 1.0
    return AdaptedMetric3D(G=G, q3=q3)


def rescale_factor(gp: GeometryPointData, q3: float) -> float:
    """Norm-rescale factor 1 + Tr(alpha) q3 + det(alpha) q3^2."""
    f = 1.0 + np.trace(gp.alpha) * q3 + np.linalg.det(gp.alpha) * q3**2
    if f <= 0.0:
        raise NonPositiveFactor(f"rescale factor {f} <= 0 at q3={q3}")
    return float(f)
