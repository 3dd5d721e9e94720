"""Centroid bodies: discrete, weighted, spherical, and the spherical polar.

A proper centrally-symmetric spherical body with center e is stored by its
gnomonic image, an origin-symmetric convex body of the chart at e. Every
spherical construction here is carried out on that image:

* Gamma_s K has image Gamma_psi g_e(K),
* Gamma_{s,e}(u_1, ..., u_N) has image Gamma_phi(g_e(u_1), ..., g_e(u_N)),
* K* is centered at -e and, in the frame at -e (which shares the basis of
  the frame at e), has image polar(g_e(K)).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import convex
from .centroids import point_weights
from .convex import Ball, DirectionGrid, EuclidBody, body_from_json, convex_hull, support
from .errors import DegenerateHull, HemisphereViolation, OriginNotInterior, ProductTooLarge
from .gnomonic import TangentFrame, WeightedDensity, chart_transform, project, radial_primitive, unproject
from .quadrature import StarPolygon
from .sphere import Rotation, SphericalCap, as_unit, normalize, reflect, slerp, tangent_directions

PROPER_MARGIN = 1e-6
MAX_ENUM = 20
ENUM_LIMIT = 12
MAX_CLOUD = 10_000_000


@dataclass(frozen=True, eq=False)
class SphericalBody:
    """Proper spherical convex body, centrally symmetric about ``center``."""

    center: np.ndarray
    image: object
    degenerate: bool = False
    frame: TangentFrame = field(default=None, repr=False)

    def __post_init__(self):
        e = as_unit(self.center)
        object.__setattr__(self, "center", e)
        if self.frame is None:
            object.__setattr__(self, "frame", TangentFrame.at(e))
        if self.image.n != len(e) - 1:
            raise ValueError("image dimension must be n for a body on S^n")
        if not self.image.symmetric:
            raise ValueError("image must be origin-symmetric")
        if self.image.degenerate:
            object.__setattr__(self, "degenerate", True)
        elif not self.image.origin_interior():
            raise OriginNotInterior("the center must be interior to the body")
        if not self.image.scale < math.tan(math.pi / 2 - PROPER_MARGIN):
            raise HemisphereViolation("body is not proper (touches the equator of its center)")

    @property
    def n(self) -> int:
        return self.image.n

    def contains(self, v, tol: float = 1e-12) -> np.ndarray:
        v = np.atleast_2d(np.asarray(v, float))
        out = np.zeros(len(v), dtype=bool)
        up = v @ self.center > 0
        if np.any(up):
            out[up] = convex.contains(self.image, project(self.frame, v[up], margin=0.0), tol)
        return out

    def boundary_samples(self, m: int = 720) -> np.ndarray:
        """Points of bd K (exact boundary points, roughly equally spaced in the chart)."""
        L = self.image
        if isinstance(L, Ball):
            pts = L.radius * tangent_directions(L.n, m)
        elif L.n == 2:
            v = L.vertices
            w = np.roll(v, -1, axis=0)
            lengths = np.linalg.norm(w - v, axis=1)
            s = np.linspace(0.0, lengths.sum(), m, endpoint=False)
            k = np.searchsorted(np.cumsum(lengths), s, side="right")
            k = np.minimum(k, len(v) - 1)
            t = (s - np.concatenate([[0.0], np.cumsum(lengths)])[k]) / lengths[k]
            pts = v[k] + t[:, None] * (w[k] - v[k])
        else:
            dirs = tangent_directions(L.n, m)
            pts = convex.radial(L, dirs)[:, None] * dirs
        return unproject(self.frame, pts)

    def rotated(self, t: Rotation) -> "SphericalBody":
        """The body t K, with its image expressed in the frame at t e."""
        dst = TangentFrame.at(t.matrix @ self.center)
        q = chart_transform(self.frame, dst, t.matrix)
        return SphericalBody(dst.center, convex.linear_image(self.image, q), self.degenerate, dst)

    def to_json(self) -> dict:
        return {"center": self.center.tolist(), "image": self.image.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "SphericalBody":
        return cls(np.asarray(obj["center"], float), body_from_json(obj["image"]))


def cap_body(cap: SphericalCap) -> SphericalBody:
    """A proper cap as a spherical body (its image is a ball of radius tan r)."""
    if not cap.proper:
        raise HemisphereViolation("a hemisphere is not a proper body")
    n = len(cap.center) - 1
    return SphericalBody(cap.center, Ball(math.tan(cap.radius), n))


# --- discrete weighted centroid bodies ------------------------------------

def gamma_f_support(points, u, f=None):
    """Support values sum f(x_i)|u . x_i| / sum f(x_i) for rows of ``u``."""
    x = np.atleast_2d(np.asarray(points, float))
    w = point_weights(x, f)
    g = (w / w.sum())[:, None] * x
    return np.abs(np.asarray(u, float) @ g.T).sum(axis=-1)


def _zonogon(gens: np.ndarray) -> np.ndarray:
    """Counter-clockwise vertices of sum_i [-g_i, g_i] in the plane."""
    ang = np.arctan2(gens[:, 1], gens[:, 0])
    flip = (ang < 0) | (ang >= math.pi)
    g = np.where(flip[:, None], -gens, gens)
    g = g[np.argsort(np.mod(np.arctan2(g[:, 1], g[:, 0]), math.pi), kind="stable")]
    steps = np.vstack([2 * g, -2 * g])
    return -g.sum(axis=0) + np.vstack([np.zeros(2), np.cumsum(steps, axis=0)[:-1]])


def gamma_f_discrete(points, f=None, method: str = "auto") -> EuclidBody:
    """Gamma_f(x_1, ..., x_N) = conv{c_f(+-x_1, ..., +-x_N)}.

    ``method`` is ``"enumerate"`` (hull of all 2^N sign choices), ``"walk"``
    (planar zonogon vertex walk or iterated Minkowski hulls in higher
    dimension) or ``"auto"`` (enumeration for N <= 12). A single generator
    gives the segment [-c x, c x] flagged degenerate; several points that do
    not span R^n raise ``DegenerateHull``.
    """
    x = np.atleast_2d(np.asarray(points, float))
    N, n = x.shape
    w = point_weights(x, f)
    gens = (w / w.sum())[:, None] * x
    if N == 1:
        return convex_hull(np.vstack([gens, -gens]), allow_degenerate=True, symmetric=True)
    if np.linalg.matrix_rank(x) < n:
        raise DegenerateHull("points do not span R^%d" % n)
    if method == "auto":
        method = "enumerate" if N <= ENUM_LIMIT else "walk"
    if method == "enumerate":
        if N > MAX_ENUM:
            raise ProductTooLarge(f"refusing to enumerate 2^{N} sign choices")
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=N)))
        return convex_hull(signs @ gens, symmetric=True)
    if method != "walk":
        raise ValueError(f"unknown method {method!r}")
    if n == 2:
        return convex_hull(_zonogon(gens), symmetric=True)
    pts = np.vstack([gens[0], -gens[0]])
    for g in gens[1:]:
        cand = np.vstack([pts + g, pts - g])
        pts = cand if len(cand) <= n + 1 else _hull_points(cand)
    return convex_hull(pts, symmetric=True)


def _hull_points(p: np.ndarray) -> np.ndarray:
    try:
        return convex_hull(p).vertices
    except DegenerateHull:
        return p


# --- weighted centroid bodies of convex bodies ----------------------------

def _abs_moment_constant(n: int) -> float:
    """Integral of |v_1| over S^{n-1}."""
    return 2 * math.pi ** ((n - 1) / 2) / math.gamma((n + 1) / 2)


def ball_gamma_radius(radius: float, d: WeightedDensity) -> float:
    """Radius of Gamma_mu of the ball of the given radius (it is a ball)."""
    n = d.dim
    area = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
    return (_abs_moment_constant(n) * radial_primitive(d, n, radius)
            / (area * radial_primitive(d, n - 1, radius)))


class _SupportEvaluator:
    """Support function of Gamma_mu L for a fixed body and density."""

    def __init__(self, L, d: WeightedDensity, resolution: int = 20000):
        if d.dim != L.n:
            raise ValueError("density dimension must match the body")
        convex._require_origin_interior(L)
        self.L, self.d = L, d
        if isinstance(L, Ball):
            self.const = ball_gamma_radius(L.radius, d)
        elif L.n == 2:
            self.star = StarPolygon(L.vertices, d)
        else:
            from .sphere import sphere_points
            v = sphere_points(L.n - 1, resolution)
            rho = convex.radial(L, v)
            self.v = v
            self.mom = radial_primitive(d, L.n, rho)
            self.mass = float(radial_primitive(d, L.n - 1, rho).sum())

    def __call__(self, u):
        u = np.atleast_2d(np.asarray(u, float))
        if isinstance(self.L, Ball):
            return self.const * np.linalg.norm(u, axis=1)
        if self.L.n == 2:
            return self.star.abs_moment(u) / self.star.mass
        return (np.abs(u @ self.v.T) @ self.mom) / self.mass


def gamma_mu_support(L, d: WeightedDensity, u):
    """h(Gamma_mu L, u) = (1/mu(L)) * integral over L of |u . y| dmu(y)."""
    out = _SupportEvaluator(L, d)(u)
    return float(out[0]) if np.ndim(u) == 1 else out


def gamma_mu_body(L, d: WeightedDensity, grid: DirectionGrid | None = None):
    """Gamma_mu L from its support values on ``grid`` (exact ball for balls)."""
    if isinstance(L, Ball):
        return Ball(ball_gamma_radius(L.radius, d), L.dim)
    grid = DirectionGrid.uniform(L.n) if grid is None else grid
    h = _SupportEvaluator(L, d)(grid.directions)
    return convex.body_from_supports(grid, h)


def gamma_s(K: SphericalBody, grid: DirectionGrid | None = None) -> SphericalBody:
    """Spherical centroid body; same center, image Gamma_psi of the image."""
    img = gamma_mu_body(K.image, WeightedDensity("psi", K.n), grid)
    return SphericalBody(K.center, img, frame=K.frame)


def gamma_se_discrete(us, e) -> SphericalBody:
    """Gamma_{s,e}(u_1, ..., u_N) via its chart image Gamma_phi(g_e(u_i))."""
    frame = TangentFrame.at(e)
    x = project(frame, np.atleast_2d(as_unit(us)))
    img = gamma_f_discrete(x, WeightedDensity("phi", frame.n))
    return SphericalBody(frame.center, img, degenerate=img.degenerate, frame=frame)


def gamma_tilde_se(us, e, per_segment: int = 9) -> np.ndarray:
    """Centroids c_s(v_1, ..., v_N) with each v_i on the geodesic [u_i^e, u_i].

    Each geodesic is sampled at ``per_segment`` equally spaced points, both
    endpoints included; the product has per_segment^N elements.
    """
    u = np.atleast_2d(as_unit(us))
    e = as_unit(e)
    N = len(u)
    if per_segment < 2:
        raise ValueError("per_segment must be at least 2")
    if N > 8 or per_segment ** N > MAX_CLOUD:
        raise ProductTooLarge(f"{per_segment}^{N} centroids requested")
    if np.any(u @ e <= 1e-9):
        raise HemisphereViolation("all points must lie in the open hemisphere of e")
    t = np.linspace(0.0, 1.0, per_segment)
    acc = np.zeros((1, len(e)))
    for ui in u:
        seg = slerp(reflect(ui, e), ui, t)
        acc = (acc[:, None, :] + seg[None, :, :]).reshape(-1, len(e))
    return normalize(acc)


def spherical_polar(K: SphericalBody) -> SphericalBody:
    """K* = {u : u . v <= 0 for all v in K}, centered at -e."""
    if K.degenerate:
        raise OriginNotInterior("a degenerate body has no proper polar")
    return SphericalBody(-K.center, convex.polar(K.image), frame=K.frame.antipodal())


def spherical_support_gap(K: SphericalBody, M: SphericalBody, grid: DirectionGrid) -> float:
    """Sup over the grid of |h(g_e K, u) - h(g_e M, u)| for bodies sharing a chart."""
    if np.max(np.abs(K.center - M.center)) > 1e-12:
        raise ValueError("bodies must share their center")
    return float(np.max(np.abs(support(K.image, grid.directions) - support(M.image, grid.directions))))


def regularity_proxy(grid: DirectionGrid, h) -> np.ndarray:
    """Discrete h + h'' on an equally spaced planar grid.

    Positive everywhere for support data of a strictly convex body with
    positive curvature radius.
    """
    h = np.asarray(h, float)
    step = 2 * math.pi / grid.resolution
    return h + (np.roll(h, -1) - 2 * h + np.roll(h, 1)) / step ** 2
