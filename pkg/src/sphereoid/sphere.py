"""Points, reflections, rotations, caps and Hausdorff distances on S^n.

Points of S^n are plain numpy arrays of length n + 1 (or stacks of them,
shape ``(m, n + 1)``). Every function that produces a point renormalizes
its output, so unit norms stay within 1e-12 through long chains of
operations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-12
_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def as_unit(u, tol: float = UNIT_TOL) -> np.ndarray:
    """Validate ``u`` as a point (or stack of points) of S^n, n >= 2.

    Raises ``ValueError`` if the norm deviates from 1 by more than ``tol``
    or if the ambient dimension is below 3. Returns a renormalized float
    copy.
    """
    u = np.array(u, dtype=float)
    if u.shape[-1] < 3:
        raise ValueError(f"need ambient dimension >= 3, got {u.shape[-1]}")
    norms = np.linalg.norm(u, axis=-1)
    if np.any(np.abs(norms - 1.0) > tol):
        raise ValueError("not a unit vector (norm off by more than %g)" % tol)
    return u / norms[..., None]


def normalize(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return u / np.linalg.norm(u, axis=-1, keepdims=True)


def spherical_distance(u, v):
    """Geodesic distance between unit vectors, 2 arcsin(|u - v| / 2).

    The chord form keeps full relative precision for nearby points, where
    arccos(u . v) loses half the digits.
    """
    chord = np.linalg.norm(np.asarray(u, float) - np.asarray(v, float), axis=-1)
    d = 2.0 * np.arcsin(np.clip(0.5 * chord, 0.0, 1.0))
    return float(d) if np.ndim(d) == 0 else d


def reflect(v, e) -> np.ndarray:
    """Geodesic reflection of ``v`` about ``e``: -v + 2 (v . e) e."""
    v = np.asarray(v, dtype=float)
    e = np.asarray(e, dtype=float)
    out = -v + 2.0 * np.sum(v * e, axis=-1, keepdims=True) * e
    return normalize(out)


def slerp(u, v, t) -> np.ndarray:
    """Points on the shorter geodesic from ``u`` to ``v`` at fractions ``t``.

    ``u`` and ``v`` must not be antipodal.
    """
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    t = np.asarray(t, float)[:, None]
    omega = spherical_distance(u, v)
    if omega < 1e-15:
        return np.repeat(u[None, :], len(t), axis=0)
    s = math.sin(omega)
    pts = (np.sin((1 - t) * omega) * u + np.sin(t * omega) * v) / s
    return normalize(pts)


@dataclass(frozen=True, eq=False)
class Rotation:
    """An element of O(n+1), stored as an orthogonal matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("rotation matrix must be square")
        if np.max(np.abs(m @ m.T - np.eye(m.shape[0]))) > 1e-12:
            raise ValueError("matrix is not orthogonal within 1e-12")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def inverse(self) -> "Rotation":
        return Rotation(self.matrix.T.copy())

    def __matmul__(self, other: "Rotation") -> "Rotation":
        return Rotation(_reorthonormalize(self.matrix @ other.matrix))

    @classmethod
    def identity(cls, dim: int) -> "Rotation":
        return cls(np.eye(dim))


def _reorthonormalize(m: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(m)
    return q * np.sign(np.diag(r))


def random_rotation(rng: np.random.Generator, dim: int) -> Rotation:
    """Haar-distributed element of O(dim) via QR of a Gaussian matrix."""
    return Rotation(_reorthonormalize(rng.standard_normal((dim, dim))))


def axis_rotation(axis, angle: float) -> Rotation:
    """Rotation of R^3 by ``angle`` about ``axis`` (Rodrigues' formula)."""
    k = normalize(axis)
    if k.shape != (3,):
        raise ValueError("axis rotations are defined in R^3 only")
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    m = np.eye(3) + math.sin(angle) * kx + (1 - math.cos(angle)) * (kx @ kx)
    return Rotation(_reorthonormalize(m))


def rotate(t: Rotation, u) -> np.ndarray:
    """Apply ``t`` to a point or a stack of points; output renormalized."""
    u = np.asarray(u, dtype=float)
    return normalize(u @ t.matrix.T)


@dataclass(frozen=True, eq=False)
class SphericalCap:
    """Closed cap of geodesic ``radius`` in (0, pi/2] around ``center``."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_unit(self.center))
        if not 0.0 < self.radius <= math.pi / 2:
            raise ValueError(f"cap radius must lie in (0, pi/2], got {self.radius}")

    @property
    def proper(self) -> bool:
        return self.radius < math.pi / 2

    def to_json(self) -> dict:
        return {"center": self.center.tolist(), "radius": float(self.radius)}

    @classmethod
    def from_json(cls, obj: dict) -> "SphericalCap":
        return cls(np.asarray(obj["center"], float), float(obj["radius"]))


def orthonormal_complement(e) -> np.ndarray:
    """Deterministic orthonormal basis of the hyperplane orthogonal to ``e``.

    Gram-Schmidt over the canonical axes in index order, skipping axes that
    are (numerically) dependent on the vectors already chosen. Returns an
    ``(n, n + 1)`` array whose rows are the basis vectors. ``e`` and ``-e``
    yield the same basis.
    """
    e = normalize(e)
    dim = e.shape[0]
    basis = [e]
    for i in range(dim):
        if len(basis) == dim:
            break
        w = np.zeros(dim)
        w[i] = 1.0
        for b in basis:
            w = w - (w @ b) * b
        nrm = np.linalg.norm(w)
        if nrm > 1e-6:
            w = w / nrm
            # second pass keeps orthogonality at the 1e-16 level
            for b in basis:
                w = w - (w @ b) * b
            basis.append(w / np.linalg.norm(w))
    return np.array(basis[1:])


def tangent_directions(n: int, m: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """``m`` quasi-uniform unit vectors of R^n (a point set on S^{n-1}).

    Equally spaced angles for n = 2, a Fibonacci spiral for n = 3, and
    normalized Gaussians (seeded, default seed 0) for n >= 4.
    """
    if n == 2:
        th = 2 * math.pi * np.arange(m) / m
        return np.column_stack([np.cos(th), np.sin(th)])
    if n == 3:
        return fibonacci_sphere(m)
    rng = np.random.default_rng(0) if rng is None else rng
    return normalize(rng.standard_normal((m, n)))


def fibonacci_sphere(m: int) -> np.ndarray:
    """Fibonacci spiral layout of ``m`` points on S^2."""
    i = np.arange(m) + 0.5
    z = 1.0 - 2.0 * i / m
    phi = 2 * math.pi * i / _GOLDEN
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def sphere_points(n: int, m: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Quasi-uniform points on S^n (Fibonacci for n = 2, Gaussian otherwise)."""
    if n == 2:
        return fibonacci_sphere(m)
    rng = np.random.default_rng(0) if rng is None else rng
    return normalize(rng.standard_normal((m, n + 1)))


def cap_boundary_samples(cap: SphericalCap, m: int) -> np.ndarray:
    """``m`` points on the boundary circle/sphere of ``cap``."""
    n = cap.center.shape[0] - 1
    if m < (3 if n == 2 else n + 1):
        raise ValueError("too few boundary samples")
    basis = orthonormal_complement(cap.center)
    dirs = tangent_directions(n, m)
    pts = math.cos(cap.radius) * cap.center + math.sin(cap.radius) * (dirs @ basis)
    return normalize(pts)


def _directed_hausdorff(a: np.ndarray, b: np.ndarray, chunk: int = 2048) -> float:
    worst = 0.0
    for i in range(0, len(a), chunk):
        block = a[i:i + chunk]
        # nearest point in b maximizes the dot product
        nearest = b[np.argmax(block @ b.T, axis=1)]
        worst = max(worst, float(np.max(spherical_distance(block, nearest))))
    return worst


def spherical_hausdorff(a, b) -> float:
    """Hausdorff distance between two finite point samples of S^n.

    The max of the two directed max-min geodesic distances. When the samples
    are boundary samples of convex bodies at distance < pi/2 this
    approximates the distance between the bodies, with accuracy limited by
    the sample spacing (see :func:`sample_resolution`).
    """
    a = np.atleast_2d(np.asarray(a, float))
    b = np.atleast_2d(np.asarray(b, float))
    if a.size == 0 or b.size == 0:
        raise ValueError("Hausdorff distance needs nonempty samples")
    return max(_directed_hausdorff(a, b), _directed_hausdorff(b, a))


def sample_resolution(a) -> float:
    """Largest geodesic nearest-neighbour gap inside a sample set."""
    a = np.atleast_2d(np.asarray(a, float))
    if len(a) < 2:
        return math.pi
    dots = a @ a.T
    np.fill_diagonal(dots, -np.inf)
    return float(np.max(spherical_distance(a, a[np.argmax(dots, axis=1)])))
