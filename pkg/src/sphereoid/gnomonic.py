"""Gnomonic chart of the open hemisphere around a center point.

The chart identifies ``int S_e^+`` with the tangent hyperplane at ``e``.
Chart points are coordinates in a fixed orthonormal basis of that
hyperplane. Spherical measures pull back to radial densities on the chart:

* ``xi``   (1 + |x|^2)^(-(n+1)/2)  -- spherical Lebesgue measure sigma
* ``phi``  (1 + |x|^2)^(-1/2)      -- the height u . e of the preimage
* ``psi``  (1 + |x|^2)^(-(n+2)/2)  -- the |e . u|-weighted measure tau
* ``lebesgue``                     -- constant 1
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import HemisphereViolation, UnsupportedPower
from .sphere import as_unit, normalize, orthonormal_complement

HEMISPHERE_MARGIN = 1e-9
KINDS = ("xi", "phi", "psi", "lebesgue")


@dataclass(frozen=True, eq=False)
class TangentFrame:
    center: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        c = as_unit(self.center)
        b = np.asarray(self.basis, dtype=float)
        if b.shape != (c.shape[0] - 1, c.shape[0]):
            raise ValueError("basis must hold n vectors of length n + 1")
        if np.max(np.abs(b @ c)) > 1e-12 or np.max(np.abs(b @ b.T - np.eye(len(b)))) > 1e-12:
            raise ValueError("frame basis is not orthonormal and orthogonal to the center")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "basis", b)

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def at(cls, e) -> "TangentFrame":
        """The canonical frame at ``e``; ``at(e)`` and ``at(-e)`` share a basis."""
        e = as_unit(e)
        return cls(e, orthonormal_complement(e))

    def antipodal(self) -> "TangentFrame":
        return TangentFrame(-self.center, self.basis)

    def to_json(self) -> dict:
        return {"center": self.center.tolist(), "basis": self.basis.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "TangentFrame":
        return cls(np.asarray(obj["center"], float), np.asarray(obj["basis"], float))


def project(f: TangentFrame, v, margin: float = HEMISPHERE_MARGIN) -> np.ndarray:
    """Gnomonic projection v/(e . v) - e, in frame coordinates.

    Accepts a point or a stack of points; raises ``HemisphereViolation``
    when some point has ``v . e <= margin``.
    """
    v = np.asarray(v, dtype=float)
    h = v @ f.center
    if np.any(h <= margin):
        raise HemisphereViolation("point outside the open hemisphere of the chart center")
    return (v @ f.basis.T) / np.asarray(h)[..., None]


def unproject(f: TangentFrame, x) -> np.ndarray:
    """Inverse chart map (x + e)/|x + e|."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("chart points must be finite")
    return normalize(x @ f.basis + f.center)


def chart_transform(src: TangentFrame, dst: TangentFrame, rotation_matrix) -> np.ndarray:
    """Matrix Q with x_dst = Q x_src when ``rotation_matrix`` maps src.center to dst.center."""
    return dst.basis @ np.asarray(rotation_matrix) @ src.basis.T


@dataclass(frozen=True)
class WeightedDensity:
    """Radial density on R^n of the given kind."""

    kind: str
    dim: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown density kind {self.kind!r}; expected one of {KINDS}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    @property
    def exponent(self) -> float:
        """Profile is (1 + r^2)^(-exponent)."""
        n = self.dim
        return {"xi": (n + 1) / 2, "phi": 0.5, "psi": (n + 2) / 2, "lebesgue": 0.0}[self.kind]

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "lebesgue":
            return np.ones_like(r)
        return (1.0 + r * r) ** (-self.exponent)

    def __call__(self, x):
        return density_eval(self, x)


def density_eval(d: WeightedDensity, x):
    """Density value at chart point(s) ``x`` (last axis = coordinates)."""
    x = np.asarray(x, dtype=float)
    out = d.profile(np.linalg.norm(x, axis=-1))
    return float(out) if np.ndim(out) == 0 else out


# --- quadrature -----------------------------------------------------------

@functools.lru_cache(maxsize=None)
def gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre_adaptive(fn, a: float, b: float, rtol: float = 1e-10,
                            atol: float = 1e-300, order: int = 20, max_depth: int = 40) -> float:
    """Adaptive Gauss-Legendre quadrature of a vectorized ``fn`` on [a, b].

    Each interval is accepted when its ``order``-point estimate agrees with
    the sum of the estimates on its two halves.
    """
    x, w = gauss_legendre(order)

    def rule(lo, hi):
        half = 0.5 * (hi - lo)
        return half * float(np.dot(w, fn(lo + half * (x + 1.0))))

    total = 0.0
    stack = [(a, b, rule(a, b), 0)]
    while stack:
        lo, hi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = rule(lo, mid), rule(mid, hi)
        if depth >= max_depth or abs(left + right - whole) <= max(atol, rtol * abs(left + right)):
            total += left + right
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return total


# --- radial primitives ----------------------------------------------------

SERIES_CUTOFF = 0.05


def _series(a: float, p: int, rho: np.ndarray, terms: int = 7) -> np.ndarray:
    """Term-wise integral of r^p (1 + r^2)^(-a) = sum_k binom(-a, k) r^(p + 2k)."""
    out = np.zeros_like(rho)
    coef = 1.0
    r2 = rho * rho
    pw = rho ** (p + 1)
    for k in range(terms):
        out = out + coef * pw / (p + 2 * k + 1)
        coef *= (-a - k) / (k + 1)
        pw = pw * r2
    return out


def _closed_form_n2(kind: str, p: int, rho: np.ndarray) -> np.ndarray:
    if kind != "lebesgue" and p == 2:
        # the closed forms below cancel catastrophically near 0
        small = rho < SERIES_CUTOFF
        if np.any(small):
            a = WeightedDensity(kind, 2).exponent
            big = np.where(small, 1.0, rho)
            return np.where(small, _series(a, p, np.where(small, rho, 0.0)),
                            _closed_form_n2_raw(kind, p, big))
    return _closed_form_n2_raw(kind, p, rho)


def _closed_form_n2_raw(kind: str, p: int, rho: np.ndarray) -> np.ndarray:
    q = 1.0 + rho * rho
    if kind == "lebesgue":
        return rho ** (p + 1) / (p + 1)
    if kind == "xi":
        if p == 1:
            # written as rho^2 / (q + sqrt q) to avoid cancellation near 0
            return rho * rho / (q + np.sqrt(q))
        return np.arcsinh(rho) - rho / np.sqrt(q)
    if kind == "psi":
        if p == 1:
            return rho * rho / (2.0 * q)
        return 0.5 * (np.arctan(rho) - rho / q)
    # phi
    if p == 1:
        return rho * rho / (np.sqrt(q) + 1.0)
    return 0.5 * (rho * np.sqrt(q) - np.arcsinh(rho))


class _PrimitiveTable:
    """Cumulative radial integrals at fixed nodes plus a short local rule.

    Node values come from adaptive Gauss-Legendre; the remainder from the
    nearest node below to rho uses a 16-point rule, which is accurate to
    round-off because consecutive nodes differ by at most 4 %.
    """

    R_MAX = 1e6

    def __init__(self, d: WeightedDensity, p: int):
        self.d, self.p = d, p
        self.nodes = np.concatenate([[0.0], np.geomspace(1e-4, self.R_MAX, 520)])
        incr = [gauss_legendre_adaptive(self.integrand, lo, hi, rtol=1e-13)
                for lo, hi in zip(self.nodes[:-1], self.nodes[1:])]
        self.values = np.concatenate([[0.0], np.cumsum(incr)])

    def integrand(self, r):
        return r ** self.p * self.d.profile(r)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        flat = rho.ravel()
        out = np.empty_like(flat)
        big = flat > self.R_MAX
        small = ~big
        k = np.searchsorted(self.nodes, flat[small], side="right") - 1
        lo = self.nodes[k]
        x, w = gauss_legendre(16)
        half = 0.5 * (flat[small] - lo)
        pts = lo[:, None] + half[:, None] * (x + 1.0)
        out[small] = self.values[k] + half * (self.integrand(pts) @ w)
        for i in np.flatnonzero(big):
            out[i] = self.values[-1] + gauss_legendre_adaptive(self.integrand, self.R_MAX, flat[i])
        return out.reshape(rho.shape)


@functools.lru_cache(maxsize=None)
def _table(d: WeightedDensity, p: int) -> _PrimitiveTable:
    return _PrimitiveTable(d, p)


def _check_power(d: WeightedDensity, p: int):
    if p not in (d.dim - 1, d.dim):
        raise UnsupportedPower(f"radial power must be n-1 or n (n={d.dim}), got {p}")


def radial_primitive(d: WeightedDensity, power: int, rho):
    """Integral of r^power * profile(r) over [0, rho]; vectorized in ``rho``.

    Closed forms for n = 2 and for the Lebesgue density; otherwise
    Gauss-Legendre quadrature with relative accuracy well below 1e-10.
    """
    _check_power(d, power)
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("rho must be nonnegative")
    if d.kind == "lebesgue":
        out = rho ** (power + 1) / (power + 1)
    elif d.dim == 2:
        out = _closed_form_n2(d.kind, power, rho)
    else:
        out = _table(d, power)(rho)
    return float(out) if np.ndim(out) == 0 else out


def radial_primitive_limit(d: WeightedDensity, power: int) -> float:
    """Limit of :func:`radial_primitive` as rho -> infinity (may be inf)."""
    _check_power(d, power)
    a, s = d.exponent, (power + 1) / 2
    if a <= s:
        return math.inf
    return 0.5 * float(special.beta(s, a - s))


def radial_primitive_inverse(d: WeightedDensity, power: int, value, bracket=(1e-12, 1e6)):
    """Solve radial_primitive(d, power, rho) = value for rho (vectorized).

    Closed form for n = 2 with power 1; otherwise bisection on the monotone
    primitive inside ``bracket``. Raises ``ValueError`` for values the
    primitive cannot reach.
    """
    _check_power(d, power)
    value = np.asarray(value, dtype=float)
    limit = radial_primitive_limit(d, power)
    if np.any(value < 0) or np.any(value >= limit):
        raise ValueError("target outside the range of the radial primitive")
    if d.kind == "lebesgue":
        out = (value * (power + 1)) ** (1.0 / (power + 1))
    elif d.dim == 2 and power == 1:
        if d.kind == "xi":
            out = np.sqrt(np.maximum((1.0 - value) ** -2 - 1.0, 0.0))
        elif d.kind == "psi":
            t = 2.0 * value
            out = np.sqrt(t / (1.0 - t))
        else:
            out = np.sqrt(np.maximum((1.0 + value) ** 2 - 1.0, 0.0))
    else:
        lo = np.full(value.shape, 0.0)
        hi = np.full(value.shape, float(bracket[1]))
        if np.any(radial_primitive(d, power, hi) < value):
            raise ValueError("target beyond the bisection bracket")
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            below = radial_primitive(d, power, mid) < value
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
    return float(out) if np.ndim(out) == 0 else out


def sphere_area(k: int) -> float:
    """Surface area of the unit sphere S^k in R^{k+1}."""
    return 2.0 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)
