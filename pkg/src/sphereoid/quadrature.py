"""Polar-coordinate integration of radial densities over planar regions.

For a region R bounded by a closed curve traversed counter-clockwise,

    mu(R)           = contour integral of P1(rho(theta)) dtheta
    int_R x dmu(x)  = contour integral of v(theta) P2(rho(theta)) dtheta

where v(theta) = (cos theta, sin theta) and P1, P2 are the closed-form
radial primitives of the density with powers 1 and 2. Contributions of
boundary pieces are signed by their angular orientation, so the formula
holds whether or not the origin lies in R.

Line segments are integrated in theta with Gauss-Legendre rules; each
segment's angular span is split so that every chunk is narrower than its
angular distance to the pole of rho = p / cos(theta - alpha). Circular
arcs are integrated in closed form.
"""
from __future__ import annotations

import math

import numpy as np

from .gnomonic import WeightedDensity, gauss_legendre, radial_primitive

GL_ORDER = 16
MAX_CHUNK = math.pi / 8
MAX_CHUNKS = 4096


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _wrap(t):
    return (t + math.pi) % (2 * math.pi) - math.pi


def segment_sectors(a, b, t0, t1, d: WeightedDensity):
    """Integrals over the sectors {r v(theta): 0 <= r <= rho(theta), theta in [t0, t1]}.

    ``rho`` is the radial distance to the line through ``a`` and ``b``;
    every angle in [t0, t1] must see that line at a positive distance.
    Returns ``(mass, moment)`` with shapes (k,) and (k, 2); both are signed
    by the sign of ``t1 - t0``.
    """
    a = np.atleast_2d(np.asarray(a, float))
    b = np.atleast_2d(np.asarray(b, float))
    t0 = np.atleast_1d(np.asarray(t0, float))
    t1 = np.atleast_1d(np.asarray(t1, float))
    k = len(a)
    mass = np.zeros(k)
    moment = np.zeros((k, 2))
    if k == 0:
        return mass, moment
    d_ab = b - a
    c_ab = _cross2(a, b)
    # foot of the perpendicular from the origin fixes the pole angle
    len2 = np.einsum("ij,ij->i", d_ab, d_ab)
    foot = a - (np.einsum("ij,ij->i", a, d_ab) / len2)[:, None] * d_ab
    alpha = np.arctan2(foot[:, 1], foot[:, 0])
    reach = np.maximum(np.abs(_wrap(t0 - alpha)), np.abs(_wrap(t1 - alpha)))
    margin = np.maximum(math.pi / 2 - reach, 1e-300)
    width = np.minimum(MAX_CHUNK, margin)
    span = t1 - t0
    chunks = np.clip(np.ceil(np.abs(span) / width), 1, MAX_CHUNKS).astype(int)
    x, w = gauss_legendre(GL_ORDER)
    for nc in np.unique(chunks):
        idx = np.flatnonzero(chunks == nc)
        frac = (np.arange(nc)[:, None] + 0.5 * (x[None, :] + 1.0)).ravel() / nc
        theta = t0[idx, None] + span[idx, None] * frac[None, :]
        vx, vy = np.cos(theta), np.sin(theta)
        denom = vx * d_ab[idx, 1, None] - vy * d_ab[idx, 0, None]
        rho = c_ab[idx, None] / denom
        weights = np.tile(w, nc)[None, :] * (span[idx] / (2.0 * nc))[:, None]
        p1 = radial_primitive(d, 1, rho)
        p2 = radial_primitive(d, 2, rho)
        mass[idx] = np.sum(weights * p1, axis=1)
        moment[idx, 0] = np.sum(weights * p2 * vx, axis=1)
        moment[idx, 1] = np.sum(weights * p2 * vy, axis=1)
    return mass, moment


def arc_sectors(radius, t0, t1, d: WeightedDensity):
    """Closed-form integrals over circular sectors of the given radius."""
    radius = np.atleast_1d(np.asarray(radius, float))
    t0 = np.atleast_1d(np.asarray(t0, float))
    t1 = np.atleast_1d(np.asarray(t1, float))
    p1 = radial_primitive(d, 1, radius)
    p2 = radial_primitive(d, 2, radius)
    mass = p1 * (t1 - t0)
    moment = np.column_stack([p2 * (np.sin(t1) - np.sin(t0)), p2 * (np.cos(t0) - np.cos(t1))])
    return mass, moment


def polygon_integrals(vertices, d: WeightedDensity):
    """Mass and first moment of a counter-clockwise simple polygon."""
    v = np.asarray(vertices, float)
    if len(v) < 3:
        return 0.0, np.zeros(2)
    a, b = v, np.roll(v, -1, axis=0)
    cr = _cross2(a, b)
    dot = np.einsum("ij,ij->i", a, b)
    scale = max(1e-300, float(np.max(np.einsum("ij,ij->i", v, v))))
    keep = np.abs(cr) > 1e-15 * scale
    a, b, cr, dot = a[keep], b[keep], cr[keep], dot[keep]
    t0 = np.arctan2(a[:, 1], a[:, 0])
    t1 = t0 + np.arctan2(cr, dot)
    mass, moment = segment_sectors(a, b, t0, t1, d)
    return float(np.sum(mass)), moment.sum(axis=0)


def disk_halfplane_integrals(radius: float, normal, offset: float, d: WeightedDensity):
    """Mass and first moment of {|x| <= radius, normal . x <= offset} (unit normal)."""
    normal = np.asarray(normal, float)
    phi = math.atan2(normal[1], normal[0])
    if offset >= radius:
        m, mom = arc_sectors(radius, 0.0, 2 * math.pi, d)
        return float(m[0]), mom[0]
    if offset <= -radius:
        return 0.0, np.zeros(2)
    beta = math.acos(offset / radius)
    # arc outside the cut, then the chord back to its start
    m_arc, mom_arc = arc_sectors(radius, phi + beta, phi + 2 * math.pi - beta, d)
    p = radius * np.array([math.cos(phi - beta), math.sin(phi - beta)])
    q = radius * np.array([math.cos(phi + beta), math.sin(phi + beta)])
    mass, moment = float(m_arc[0]), mom_arc[0].copy()
    if abs(offset) > 1e-15 * radius:
        # the chord p -> q sweeps theta from phi - beta to phi + beta when
        # the origin is on the kept side, and backwards otherwise
        t0 = phi - beta
        t1 = phi + beta if offset > 0 else phi + beta - 2 * math.pi
        m_ch, mom_ch = segment_sectors(p, q, t0, t1, d)
        mass += float(m_ch[0])
        moment += mom_ch[0]
    return mass, moment


class StarPolygon:
    """Cumulative sector integrals of a polygon with the origin inside.

    Supports fast evaluation of moments over every half-plane through the
    origin, the workhorse of weighted centroid bodies.
    """

    def __init__(self, vertices, d: WeightedDensity):
        v = np.asarray(vertices, float)
        self.d = d
        self.a = v
        self.b = np.roll(v, -1, axis=0)
        steps = np.arctan2(_cross2(self.a, self.b), np.einsum("ij,ij->i", self.a, self.b))
        if np.any(steps <= 0):
            raise ValueError("origin must be interior to a counter-clockwise polygon")
        t_first = math.atan2(v[0, 1], v[0, 0])
        self.theta = t_first + np.concatenate([[0.0], np.cumsum(steps)])
        mass, moment = segment_sectors(self.a, self.b, self.theta[:-1], self.theta[1:], d)
        self.cum_mass = np.concatenate([[0.0], np.cumsum(mass)])
        self.cum_moment = np.vstack([np.zeros(2), np.cumsum(moment, axis=0)])

    @property
    def mass(self) -> float:
        return float(self.cum_mass[-1])

    @property
    def moment(self) -> np.ndarray:
        return self.cum_moment[-1]

    def _cumulative(self, psi):
        """Mass and moment of the sector from theta[0] to psi (psi in [theta0, theta0 + 2 pi))."""
        k = np.clip(np.searchsorted(self.theta, psi, side="right") - 1, 0, len(self.a) - 1)
        m, mom = segment_sectors(self.a[k], self.b[k], self.theta[k], psi, self.d)
        return self.cum_mass[k] + m, self.cum_moment[k] + mom

    def halfplane_moments(self, directions):
        """Mass and moment of L cap {x : u . x >= 0} for each row u."""
        u = np.atleast_2d(np.asarray(directions, float))
        base = self.theta[0]
        start = np.arctan2(u[:, 1], u[:, 0]) - math.pi / 2
        start = base + np.mod(start - base, 2 * math.pi)
        stop = start + math.pi
        wraps = stop >= base + 2 * math.pi
        stop = np.where(wraps, stop - 2 * math.pi, stop)
        m0, c0 = self._cumulative(start)
        m1, c1 = self._cumulative(stop)
        mass = m1 - m0 + np.where(wraps, self.mass, 0.0)
        moment = c1 - c0 + np.where(wraps[:, None], self.moment[None, :], 0.0)
        return mass, moment

    def abs_moment(self, directions):
        """Integral of |u . y| dmu(y) over L for each row u."""
        u = np.atleast_2d(np.asarray(directions, float))
        _, upper = self.halfplane_moments(u)
        return np.einsum("ij,ij->i", u, 2.0 * upper - self.moment[None, :])
