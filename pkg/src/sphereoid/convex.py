"""Convex bodies in the tangent chart R^n.

Two body types share one functional interface:

* :class:`EuclidBody` -- the convex hull of a finite vertex list. For n = 2
  the vertices are kept in counter-clockwise order and every operation is
  exact; for n >= 3 facets come from qhull.
* :class:`Ball` -- an origin-centered Euclidean ball, kept exact because
  caps and matched balls are the equality cases of every inequality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import DegenerateHull, InfeasibleSupports, OriginNotInterior
from .sphere import fibonacci_sphere, normalize, tangent_directions
from .gnomonic import sphere_area

HULL_TOL = 1e-12
ORIGIN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EuclidBody:
    """Convex polytope given by its vertices (hull-reduced).

    Use :func:`convex_hull` to build one from arbitrary points. ``degenerate``
    marks lower-dimensional hulls (e.g. the segment of a single generator).
    """

    vertices: np.ndarray
    symmetric: bool = False
    degenerate: bool = False
    _hull: object = field(default=None, repr=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or len(v) == 0:
            raise ValueError("vertices must be a nonempty (m, n) array")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def n(self) -> int:
        return self.vertices.shape[1]

    @property
    def full_dimensional(self) -> bool:
        return not self.degenerate

    @cached_property
    def equations(self) -> tuple[np.ndarray, np.ndarray]:
        """Facet description (A, b) with the body equal to {x : A x <= b}."""
        if self.degenerate:
            raise DegenerateHull("a lower-dimensional hull has no facet description")
        if self.n == 2:
            v = self.vertices
            edge = np.roll(v, -1, axis=0) - v
            normals = normalize(np.column_stack([edge[:, 1], -edge[:, 0]]))
            return normals, np.einsum("ij,ij->i", normals, v)
        hull = self._hull if self._hull is not None else ConvexHull(self.vertices)
        return hull.equations[:, :-1].copy(), -hull.equations[:, -1].copy()

    def origin_interior(self, tol: float = ORIGIN_TOL) -> bool:
        if self.degenerate:
            return False
        _, b = self.equations
        return bool(np.all(b > tol * max(1.0, self.scale)))

    @property
    def scale(self) -> float:
        return float(np.max(np.linalg.norm(self.vertices, axis=1)))

    def to_json(self) -> dict:
        out = {"vertices": self.vertices.tolist(), "symmetric": bool(self.symmetric)}
        if self.degenerate:
            out["degenerate"] = True
        return out


@dataclass(frozen=True)
class Ball:
    """Origin-centered closed Euclidean ball of R^dim."""

    radius: float
    dim: int = 2

    def __post_init__(self):
        if not self.radius > 0 or not math.isfinite(self.radius):
            raise ValueError("ball radius must be positive and finite")

    @property
    def n(self) -> int:
        return self.dim

    symmetric = True
    degenerate = False
    full_dimensional = True

    @property
    def scale(self) -> float:
        return float(self.radius)

    def origin_interior(self, tol: float = ORIGIN_TOL) -> bool:
        return True

    def to_json(self) -> dict:
        return {"radius": float(self.radius), "dim": int(self.dim)}


def body_from_json(obj: dict):
    if "radius" in obj:
        return Ball(float(obj["radius"]), int(obj.get("dim", 2)))
    return convex_hull(np.asarray(obj["vertices"], float),
                       allow_degenerate=bool(obj.get("degenerate", False)))


@dataclass(frozen=True)
class HalfSpace:
    """The set {x : normal . x <= offset}, normal of unit length."""

    normal: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        nv = np.asarray(self.normal, dtype=float)
        nrm = np.linalg.norm(nv)
        if nrm < 1e-300:
            raise ValueError("half-space normal must be nonzero")
        object.__setattr__(self, "normal", nv / nrm)
        object.__setattr__(self, "offset", float(self.offset) / nrm)

    @classmethod
    def through_origin(cls, u) -> "HalfSpace":
        """H_u^+ = {x : u . x >= 0} as a half-space with normal -u."""
        return cls(-np.asarray(u, dtype=float), 0.0)


@dataclass(frozen=True, eq=False)
class DirectionGrid:
    """Quasi-uniform directions on S^{n-1}, closed under negation."""

    directions: np.ndarray

    @property
    def resolution(self) -> int:
        return len(self.directions)

    @property
    def n(self) -> int:
        return self.directions.shape[1]

    @property
    def weights(self) -> np.ndarray:
        """Equal quadrature weights summing to the area of S^{n-1}."""
        return np.full(self.resolution, sphere_area(self.n - 1) / self.resolution)

    @classmethod
    def uniform(cls, n: int = 2, resolution: int | None = None) -> "DirectionGrid":
        if resolution is None:
            resolution = 720 if n == 2 else 2000
        if resolution % 2:
            raise ValueError("grid resolution must be even (closed under negation)")
        if n == 2:
            return cls(tangent_directions(2, resolution))
        half = fibonacci_sphere(resolution // 2) if n == 3 else tangent_directions(n, resolution // 2)
        return cls(np.vstack([half, -half]))

    @cached_property
    def angles(self) -> np.ndarray:
        if self.n != 2:
            raise ValueError("angles exist for planar grids only")
        return np.arctan2(self.directions[:, 1], self.directions[:, 0])


# --- hulls ----------------------------------------------------------------

def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _monotone_chain(points: np.ndarray) -> np.ndarray:
    pts = sorted(map(tuple, points))
    lower: list = []
    for p in pts:
        while len(lower) > 1 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) > 1 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _prune(v: np.ndarray, tol: float) -> np.ndarray:
    """Drop near-duplicate vertices, then vertices within ``tol`` of the
    chord through their neighbours; either move changes the hull by at most
    ``tol`` in Hausdorff distance."""
    while len(v) > 3:
        step = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
        if step.min() <= tol:
            v = np.delete(v, int(np.argmin(step)), axis=0)
            continue
        prev, nxt = np.roll(v, 1, axis=0), np.roll(v, -1, axis=0)
        chord = nxt - prev
        cr = chord[:, 0] * (v[:, 1] - prev[:, 1]) - chord[:, 1] * (v[:, 0] - prev[:, 0])
        height = np.abs(cr) / np.maximum(np.linalg.norm(chord, axis=1), 1e-300)
        k = int(np.argmin(height))
        if height[k] > tol:
            break
        v = np.delete(v, k, axis=0)
    return v


def _is_symmetric(v: np.ndarray, tol: float) -> bool:
    if len(v) > 4000:
        return False
    d = np.linalg.norm(v[:, None, :] + v[None, :, :], axis=-1)
    return bool(np.all(d.min(axis=1) <= tol))


def convex_hull(points, allow_degenerate: bool = False, symmetric: bool | None = None) -> EuclidBody:
    """Hull-reduced convex hull of a point set in R^n.

    Planar hulls use Andrew's monotone chain with collinear vertices pruned;
    higher dimensions use qhull. A span-deficient point set raises
    ``DegenerateHull`` unless ``allow_degenerate`` is set, in which case a
    planar segment (its two extreme points) is returned flagged degenerate.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("points must be a nonempty (m, n) array")
    n = pts.shape[1]
    scale = max(1.0, float(np.max(np.abs(pts))))
    sv = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False) if len(pts) > 1 else np.zeros(1)
    rank = int(np.sum(sv > 1e-10 * scale))
    if rank < n:
        if not allow_degenerate:
            raise DegenerateHull("points do not span R^%d; hull has empty interior" % n)
        if n != 2:
            raise DegenerateHull("degenerate hulls are supported in the plane only")
        c = pts.mean(axis=0)
        if sv[0] <= 1e-10 * scale:
            verts = c[None, :]
        else:
            axis = np.linalg.svd(pts - c)[2][0]
            t = (pts - c) @ axis
            verts = pts[[int(np.argmin(t)), int(np.argmax(t))]]
        sym = _is_symmetric(verts, 1e-12 * scale) if symmetric is None else symmetric
        return EuclidBody(verts, symmetric=sym, degenerate=True)
    if n == 2:
        verts = _prune(_monotone_chain(pts), HULL_TOL * scale)
        if len(verts) < 3:
            raise DegenerateHull("hull collapsed below three vertices")
        hull = None
    else:
        try:
            hull = ConvexHull(pts)
        except QhullError as exc:
            raise DegenerateHull(str(exc)) from exc
        verts = pts[hull.vertices]
    sym = _is_symmetric(verts, 1e-12 * scale) if symmetric is None else symmetric
    return EuclidBody(verts, symmetric=sym, _hull=hull)


# --- support, radial, polar -----------------------------------------------

def support(L, u):
    """Support function max{u . x : x in L}; ``u`` may be a stack of vectors."""
    u = np.asarray(u, dtype=float)
    if isinstance(L, Ball):
        out = L.radius * np.linalg.norm(u, axis=-1)
    else:
        out = np.max(u @ L.vertices.T, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _require_origin_interior(L):
    if not L.origin_interior():
        raise OriginNotInterior("the origin must be an interior point of the body")


def radial(L, v):
    """Radial function sup{t >= 0 : t v in L}, exact from the facets."""
    _require_origin_interior(L)
    v = np.asarray(v, dtype=float)
    if isinstance(L, Ball):
        out = L.radius / np.linalg.norm(v, axis=-1)
    else:
        a, b = L.equations
        dots = np.atleast_2d(v) @ a.T
        with np.errstate(divide="ignore"):
            ratios = np.where(dots > 1e-300, b / np.where(dots > 1e-300, dots, 1.0), np.inf)
        out = ratios.min(axis=-1)
        if v.ndim == 1:
            out = out[0]
    return float(out) if np.ndim(out) == 0 else out


def polar(L):
    """Polar body {x : x . y <= 1 for all y in L}.

    Facet (a, b) of L becomes the polar vertex a / b, so the planar polar is
    exact and the vertex order stays counter-clockwise.
    """
    _require_origin_interior(L)
    if isinstance(L, Ball):
        return Ball(1.0 / L.radius, L.dim)
    a, b = L.equations
    return convex_hull(a / b[:, None], symmetric=L.symmetric)


def contains(L, points, tol: float = 1e-12) -> np.ndarray:
    """Boolean membership of each point (rows of ``points``) in L."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(L, Ball):
        return np.linalg.norm(pts, axis=1) <= L.radius * (1 + tol)
    a, b = L.equations
    return np.all(pts @ a.T <= b + tol * max(1.0, L.scale), axis=1)


def euclid_hausdorff(L, M, grid: DirectionGrid) -> float:
    """Max over grid directions of |h(L, u) - h(M, u)|.

    A lower bound on the Hausdorff distance that converges as the grid
    is refined.
    """
    return float(np.max(np.abs(support(L, grid.directions) - support(M, grid.directions))))


def body_from_supports(grid: DirectionGrid, values) -> EuclidBody:
    """The body {x : u . x <= h(u) for all grid directions u}.

    Built as the polar of conv{u / h(u)}, which discards redundant
    constraints automatically. The result contains every body whose support
    function takes these values on the grid.
    """
    h = np.asarray(values, dtype=float)
    if h.shape != (grid.resolution,):
        raise ValueError("need one support value per grid direction")
    if np.any(~np.isfinite(h)) or np.any(h <= 0):
        raise InfeasibleSupports("support values must be positive and finite")
    try:
        dual = convex_hull(grid.directions / h[:, None])
    except DegenerateHull as exc:
        raise InfeasibleSupports(str(exc)) from exc
    if not dual.origin_interior():
        raise InfeasibleSupports("support values describe an unbounded set")
    sym = bool(np.allclose(h, _negated_values(grid, h), rtol=1e-9, atol=0.0))
    return polar(EuclidBody(dual.vertices, symmetric=sym, _hull=dual._hull))


def _negated_values(grid: DirectionGrid, h: np.ndarray) -> np.ndarray:
    if grid.n == 2 and grid.resolution % 2 == 0:
        # equally spaced planar grids: -u_k = u_{k + m/2}
        return np.roll(h, grid.resolution // 2)
    idx = np.argmin(np.linalg.norm(grid.directions[:, None] + grid.directions[None], axis=-1), axis=1)
    return h[idx]


def clip_polygon(vertices: np.ndarray, hs: HalfSpace) -> np.ndarray:
    """Sutherland-Hodgman clip of a CCW polygon by {x : normal . x <= offset}."""
    v = np.asarray(vertices, dtype=float)
    if len(v) == 0:
        return v
    s = v @ hs.normal - hs.offset
    out = []
    m = len(v)
    for i in range(m):
        j = (i + 1) % m
        inside_i, inside_j = s[i] <= 0, s[j] <= 0
        if inside_i:
            out.append(v[i])
        if inside_i != inside_j:
            t = s[i] / (s[i] - s[j])
            out.append(v[i] + t * (v[j] - v[i]))
    return np.array(out).reshape(-1, v.shape[1])


def linear_image(L, q: np.ndarray):
    """Image of L under an orthogonal map ``q`` of the chart."""
    if isinstance(L, Ball):
        return L
    pts = L.vertices @ np.asarray(q).T
    if L.n == 2 and np.linalg.det(q) < 0:
        pts = pts[::-1]
    if L.degenerate:
        return EuclidBody(pts, symmetric=L.symmetric, degenerate=True)
    if L.n == 2:
        return EuclidBody(pts, symmetric=L.symmetric)
    return convex_hull(pts, symmetric=L.symmetric)


def scaled(L, factor: float):
    if isinstance(L, Ball):
        return Ball(L.radius * factor, L.dim)
    return EuclidBody(L.vertices * factor, symmetric=L.symmetric, degenerate=L.degenerate)


def regular_polygon(radius: float, m: int, phase: float = 0.0) -> EuclidBody:
    """Regular m-gon inscribed in the circle of the given radius."""
    th = phase + 2 * math.pi * np.arange(m) / m
    return EuclidBody(radius * np.column_stack([np.cos(th), np.sin(th)]), symmetric=(m % 2 == 0))
