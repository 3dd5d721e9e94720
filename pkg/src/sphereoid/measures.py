"""Spherical measures through the chart, and matched caps and balls."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import SphericalBody, cap_body
from .centroids import region_moments
from .convex import Ball, _require_origin_interior
from .errors import TargetOutOfRange
from .gnomonic import WeightedDensity, radial_primitive, radial_primitive_inverse, radial_primitive_limit
from .sphere import SphericalCap

BISECT_ITERS = 80


def _area(n: int) -> float:
    """Area of S^{n-1}."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def measure_chart_body(L, d: WeightedDensity, resolution: int = 20000) -> float:
    """Integral of the density d over L (origin interior)."""
    _require_origin_interior(L)
    if isinstance(L, Ball):
        return _area(L.dim) * radial_primitive(d, L.dim - 1, L.radius)
    mass, _ = region_moments(L, d, resolution=resolution)
    return float(mass)


def sigma_body(K: SphericalBody) -> float:
    """Spherical Lebesgue measure of K."""
    return measure_chart_body(K.image, WeightedDensity("xi", K.n))


def tau_body(K: SphericalBody) -> float:
    """Measure of K with density |e . u|."""
    return measure_chart_body(K.image, WeightedDensity("psi", K.n))


def cap_measure(r, which: str = "sigma", n: int = 2):
    """sigma or tau of a cap of radius r on S^n (vectorized in r)."""
    r = np.asarray(r, float)
    if n == 2:
        out = 2 * math.pi * (1 - np.cos(r)) if which == "sigma" else math.pi * np.sin(r) ** 2
    else:
        kind = {"sigma": "xi", "tau": "psi"}[which]
        out = _area(n) * radial_primitive(WeightedDensity(kind, n), n - 1, np.tan(r))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class MatchedCap:
    cap: SphericalCap
    matched_measure: str
    residual: float

    @property
    def body(self) -> SphericalBody:
        return cap_body(self.cap)


@dataclass(frozen=True)
class MatchedBall:
    radius: float
    density: WeightedDensity
    residual: float

    @property
    def ball(self) -> Ball:
        return Ball(self.radius, self.density.dim)


def match_cap(K: SphericalBody, which: str = "tau") -> MatchedCap:
    """Cap about the center of K with the same sigma- or tau-measure."""
    if which not in ("sigma", "tau"):
        raise ValueError("which must be 'sigma' or 'tau'")
    n = K.n
    target = sigma_body(K) if which == "sigma" else tau_body(K)
    top = cap_measure(math.pi / 2, which, n) if n == 2 else _area(n) * radial_primitive_limit(
        WeightedDensity("xi" if which == "sigma" else "psi", n), n - 1)
    if not 0 < target < top:
        raise TargetOutOfRange(f"{which}(K) = {target!r} is outside (0, {top!r})")
    if isinstance(K.image, Ball):
        r = math.atan(K.image.radius)
    elif n == 2:
        if which == "sigma":
            r = math.acos(1 - target / (2 * math.pi))
        else:
            r = math.asin(math.sqrt(target / math.pi))
    else:
        lo, hi = 0.0, math.pi / 2
        for _ in range(BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            if cap_measure(mid, which, n) < target:
                lo = mid
            else:
                hi = mid
        r = 0.5 * (lo + hi)
    residual = cap_measure(r, which, n) - target
    return MatchedCap(SphericalCap(K.center, r), which, float(residual))


def match_ball(L, d: WeightedDensity) -> MatchedBall:
    """Origin-centered ball B with d(B) = d(L)."""
    if isinstance(L, Ball):
        return MatchedBall(L.radius, d, 0.0)
    n = L.n
    target = measure_chart_body(L, d)
    try:
        r = radial_primitive_inverse(d, n - 1, target / _area(n))
    except ValueError as exc:
        raise TargetOutOfRange(str(exc)) from exc
    residual = _area(n) * radial_primitive(d, n - 1, r) - target
    return MatchedBall(float(r), d, float(residual))
