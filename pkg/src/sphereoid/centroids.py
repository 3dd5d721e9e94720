"""Discrete and continuous centroids on the sphere and in the chart.

Continuous spherical centroids are computed in the gnomonic chart: the
sigma-moment of a region A of the open hemisphere around e splits into a
tangent part, the psi-moment of g_e(A), and a normal part, the psi-mass
of g_e(A). Their quotient is the psi-centroid of g_e(A), so

    g_e(c_s(A)) = c_psi(g_e(A)).
"""
from __future__ import annotations

import math

import numpy as np

from .convex import Ball, HalfSpace, _require_origin_interior, clip_polygon, radial
from .errors import CentroidUndefined, MeasureTooSmall
from .gnomonic import TangentFrame, WeightedDensity, radial_primitive, unproject
from .quadrature import disk_halfplane_integrals, polygon_integrals
from .sphere import as_unit, sphere_points

CENTROID_TOL = 1e-12
MEASURE_TOL = 1e-12


def c_s_discrete(points) -> np.ndarray:
    """Spherical centroid sum(u_i) / |sum(u_i)| of a finite point set."""
    u = np.atleast_2d(as_unit(points))
    s = u.sum(axis=0)
    nrm = np.linalg.norm(s)
    if nrm <= CENTROID_TOL:
        raise CentroidUndefined("the points sum to (numerically) zero")
    return s / nrm


def point_weights(points, f=None) -> np.ndarray:
    """Weights f(x_i) for a density, a callable, explicit values, or f = 1."""
    x = np.atleast_2d(np.asarray(points, float))
    if f is None:
        w = np.ones(len(x))
    elif isinstance(f, WeightedDensity):
        w = f.profile(np.linalg.norm(x, axis=1))
    elif callable(f):
        w = np.asarray([f(p) for p in x], float)
    else:
        w = np.asarray(f, float)
    if w.shape != (len(x),):
        raise ValueError("need exactly one weight per point")
    if np.any(~(w > 0)) or np.any(~np.isfinite(w)):
        raise ValueError("weights must be positive and finite")
    return w


def c_f_discrete(points, f=None) -> np.ndarray:
    """Weighted average sum f(x_i) x_i / sum f(x_i)."""
    x = np.atleast_2d(np.asarray(points, float))
    if len(x) == 0:
        raise ValueError("need at least one point")
    w = point_weights(x, f)
    return (w @ x) / w.sum()


# --- region moments in the chart -------------------------------------------

def _grid_moments(L, d: WeightedDensity, hs: HalfSpace | None, resolution: int):
    """Direction-grid quadrature in polar coordinates for n >= 3."""
    n = L.n
    if hs is not None and abs(hs.offset) > 0:
        raise NotImplementedError("offset half-spaces are supported in the plane only")
    _require_origin_interior(L)
    v = sphere_points(n - 1, resolution)
    w = np.full(len(v), 2 * math.pi ** (n / 2) / math.gamma(n / 2) / len(v))
    if hs is not None:
        w = w * (v @ hs.normal <= 0)
    rho = radial(L, v)
    mass = float(w @ radial_primitive(d, n - 1, rho))
    moment = (w * radial_primitive(d, n, rho)) @ v
    return mass, moment


def region_moments(L, d: WeightedDensity, hs: HalfSpace | None = None,
                   resolution: int = 20000):
    """Mass and first moment of L (optionally intersected with ``hs``) under d.

    Exact up to Gauss-Legendre error for planar bodies (closed-form radial
    integrals); a direction-grid quadrature with ``resolution`` rays for
    n >= 3.
    """
    if L.n != 2:
        return _grid_moments(L, d, hs, resolution)
    if isinstance(L, Ball):
        if hs is None:
            return disk_halfplane_integrals(L.radius, (1.0, 0.0), math.inf, d)
        return disk_halfplane_integrals(L.radius, hs.normal, hs.offset, d)
    if L.degenerate:
        return 0.0, np.zeros(2)
    verts = L.vertices if hs is None else clip_polygon(L.vertices, hs)
    return polygon_integrals(verts, d)


def c_mu_region(L, d: WeightedDensity, hs: HalfSpace | None = None) -> np.ndarray:
    """The d-centroid of L, or of L cap hs when a half-space is given."""
    mass, moment = region_moments(L, d, hs)
    if not mass > MEASURE_TOL:
        raise MeasureTooSmall(f"region measure {mass:.3e} is below {MEASURE_TOL:g}")
    return moment / mass


def chart_halfspace(frame: TangentFrame, u) -> HalfSpace | None:
    """Chart image of the hemisphere {v : u . v >= 0}.

    Returns ``None`` when the hemisphere contains the whole open hemisphere
    of the chart center (u = e).
    """
    u = np.asarray(u, float)
    ut = frame.basis @ u
    ue = float(u @ frame.center)
    if np.linalg.norm(ut) <= 1e-15:
        if ue > 0:
            return None
        raise MeasureTooSmall("hemisphere misses the chart hemisphere")
    return HalfSpace(-ut, ue)


def c_s_region(K, u=None) -> np.ndarray:
    """Spherical centroid of K, or of K cap {v : u . v >= 0}, via the chart.

    ``K`` is a spherical body (anything with ``frame`` and ``image``).
    """
    try:
        hs = None if u is None else chart_halfspace(K.frame, u)
        x = c_mu_region(K.image, WeightedDensity("psi", K.image.n), hs)
    except MeasureTooSmall as exc:
        raise CentroidUndefined(str(exc)) from exc
    return unproject(K.frame, x)
