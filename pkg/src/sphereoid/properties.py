"""Seeded invariant checks aggregated by the property-suite experiment.

Each check draws one random instance and returns an error (0 for exact
agreement, ``inf`` for a broken qualitative property); the suite compares
it against a tolerance.
"""
from __future__ import annotations

import math

import numpy as np

from . import convex
from .bodies import (SphericalBody, cap_body, gamma_f_discrete, gamma_f_support, gamma_mu_body,
                     gamma_mu_support, gamma_s, gamma_se_discrete, gamma_tilde_se, spherical_support_gap,
                     regularity_proxy, spherical_polar)
from .centroids import c_f_discrete, c_mu_region, c_s_discrete, c_s_region
from .convex import DirectionGrid, HalfSpace, support
from .gnomonic import TangentFrame, WeightedDensity, project, unproject
from .measures import match_cap, measure_chart_body, sigma_body, tau_body
from .sphere import SphericalCap, cap_boundary_samples, random_rotation, spherical_hausdorff


def _hemisphere_points(rng, m, e, min_height=0.05):
    v = rng.standard_normal((m, len(e)))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    v = np.where((v @ e)[:, None] < 0, -v, v)
    v = v[v @ e > min_height]
    return v


def _random_body(rng, n=2):
    from .experiments import random_symmetric_body
    return random_symmetric_body(rng, int(rng.integers(3, 10)), float(rng.uniform(0, 0.9)), n)


def _north(n=2):
    e = np.zeros(n + 1)
    e[-1] = 1.0
    return e


def chart_roundtrip(rng, cfg):
    e = _north(cfg.n)
    f = TangentFrame.at(e)
    u = _hemisphere_points(rng, 1000, e)
    return float(np.max(np.abs(unproject(f, project(f, u)) - u)))


def chart_height(rng, cfg):
    e = _north(cfg.n)
    f = TangentFrame.at(e)
    u = _hemisphere_points(rng, 1000, e)
    phi = WeightedDensity("phi", cfg.n)(project(f, u))
    return float(np.max(np.abs(phi - u @ e)))


def discrete_chart_identity(rng, cfg):
    e = _north(cfg.n)
    f = TangentFrame.at(e)
    u = _hemisphere_points(rng, int(rng.integers(1, 30)), e, 0.2)
    if len(u) == 0:
        return 0.0
    lhs = project(f, c_s_discrete(u))
    rhs = c_f_discrete(project(f, u), WeightedDensity("phi", cfg.n))
    return float(np.max(np.abs(lhs - rhs)))


def discrete_equivariance(rng, cfg):
    u = _hemisphere_points(rng, 10, _north(cfg.n))
    t = random_rotation(rng, cfg.n + 1)
    return float(np.max(np.abs(c_s_discrete(u @ t.matrix.T) - t.matrix @ c_s_discrete(u))))


def region_equivariance(rng, cfg):
    if cfg.n != 2:
        return 0.0
    K = _random_body(rng)
    t = random_rotation(rng, 3)
    w = rng.standard_normal(3)
    w -= (w @ K.center) * K.center
    w /= np.linalg.norm(w)
    a = c_s_region(K.rotated(t), t.matrix @ w)
    b = t.matrix @ c_s_region(K, w)
    return float(np.max(np.abs(a - b)))


def gamma_f_equivalence(rng, cfg):
    n = cfg.n
    N = int(rng.integers(n, 11))
    x = rng.standard_normal((N, n))
    phi = WeightedDensity("phi", n)
    grid = DirectionGrid.uniform(n, 360 if n == 2 else 400)
    body = gamma_f_discrete(x, phi, method="enumerate")
    err = np.max(np.abs(support(body, grid.directions) - gamma_f_support(x, grid.directions, phi)))
    if n == 2:
        walk = gamma_f_discrete(x, phi, method="walk")
        err = max(err, np.max(np.abs(support(walk, grid.directions) - support(body, grid.directions))))
    return float(err)


def gamma_tilde_identity(rng, cfg):
    if cfg.n != 2:
        return 0.0
    e = _north()
    u = _hemisphere_points(rng, 3, e, 0.2)[: int(rng.integers(1, 4))]
    if len(u) == 0:
        return 0.0
    f = TangentFrame.at(e)
    cloud = project(f, gamma_tilde_se(u, e, 9))
    body = gamma_se_discrete(u, e).image
    grid = DirectionGrid.uniform(2, 360)
    hull = convex.convex_hull(cloud, allow_degenerate=True)
    return float(np.max(np.abs(support(hull, grid.directions) - support(body, grid.directions))))


def radial_monotonicity(rng, cfg):
    n = cfg.n
    N = int(rng.integers(2, 8))
    z = rng.standard_normal((N, n))
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    phi = WeightedDensity("phi", n)
    vals = []
    for lam in np.linspace(0.1, 1.0, 10):
        x = z.copy()
        x[0] *= lam
        vals.append(float(gamma_f_support(x, v, phi)))
    return 0.0 if np.all(np.diff(vals) > 0) else math.inf


def segment_inclusion(rng, cfg):
    n = cfg.n
    N = int(rng.integers(n, 8))
    x = rng.standard_normal((N, n))
    y = rng.uniform(-1, 1, N)[:, None] * x
    phi = WeightedDensity("phi", n)
    grid = DirectionGrid.uniform(n, 360 if n == 2 else 400)
    excess = gamma_f_support(y, grid.directions, phi) - gamma_f_support(x, grid.directions, phi)
    return float(max(0.0, np.max(excess)))


def boundary_characterization(rng, cfg):
    if cfg.n != 2:
        return 0.0
    L = _random_body(rng).image
    d = WeightedDensity(str(rng.choice(["psi", "xi", "lebesgue"])), 2)
    grid = DirectionGrid.uniform(2, cfg.grid_resolution)
    body = gamma_mu_body(L, d, grid)
    err = 0.0
    # the reconstructed body is exact at grid directions
    for u in grid.directions[rng.choice(grid.resolution, 8, replace=False)]:
        c = c_mu_region(L, d, HalfSpace.through_origin(u))
        h = gamma_mu_support(L, d, u)
        err = max(err, abs(h - u @ c), abs(support(body, u) - u @ c) / max(h, 1e-300))
    return err


def gamma_s_equivariance(rng, cfg):
    if cfg.n != 2:
        return 0.0
    K = _random_body(rng)
    t = random_rotation(rng, 3)
    grid = DirectionGrid.uniform(2, 4 * cfg.grid_resolution)
    a = gamma_s(K.rotated(t), grid)
    b = gamma_s(K, grid).rotated(t)
    # chart Hausdorff distance, an upper bound for the spherical one
    return spherical_support_gap(a, b, DirectionGrid.uniform(2, 4096))


def polar_hausdorff(rng, cfg):
    e = _north(cfg.n)
    r1, r2 = np.sort(rng.uniform(0.1, 1.4, 2))
    caps = [SphericalCap(e, r) for r in (r1, r2)]
    polars = [SphericalCap(-e, math.pi / 2 - r) for r in (r1, r2)]
    d = spherical_hausdorff(*(cap_boundary_samples(c, 360) for c in caps))
    dp = spherical_hausdorff(*(cap_boundary_samples(c, 360) for c in polars))
    # the polar computed from the chart must match the closed form
    P = spherical_polar(cap_body(caps[0]))
    closed = math.tan(math.pi / 2 - r1)
    return max(abs(d - dp), abs(P.image.radius - closed) / closed)


def measure_monotonicity(rng, cfg):
    if cfg.n != 2:
        return 0.0
    L = _random_body(rng).image
    M = convex.scaled(L, 1.0 + rng.uniform(0.01, 0.5))
    for kind in ("xi", "psi", "phi", "lebesgue"):
        d = WeightedDensity(kind, 2)
        if not measure_chart_body(L, d) < measure_chart_body(M, d):
            return math.inf
    return 0.0


def measure_rotation_invariance(rng, cfg):
    if cfg.n != 2:
        return 0.0
    K = _random_body(rng)
    t = random_rotation(rng, 3)
    s, s2 = sigma_body(K), sigma_body(K.rotated(t))
    return abs(s - s2) / s


def cap_injectivity(rng, cfg):
    e = _north(cfg.n)
    r1, r2 = np.sort(rng.uniform(0.1, 1.4, 2))
    if r2 - r1 < 1e-3:
        return 0.0
    a, b = (gamma_s(cap_body(SphericalCap(e, r))) for r in (r1, r2))
    return 0.0 if abs(a.image.radius - b.image.radius) > 1e-9 else math.inf


def matched_caps_nested(rng, cfg):
    if cfg.n != 2:
        return 0.0
    K = _random_body(rng)
    rt, rs = match_cap(K, "tau").cap.radius, match_cap(K, "sigma").cap.radius
    return max(0.0, rt - rs)


def regularity(rng, cfg):
    if cfg.n != 2:
        return 0.0
    K = _random_body(rng)
    grid = DirectionGrid.uniform(2, cfg.grid_resolution)
    h = gamma_mu_support(K.image, WeightedDensity("psi", 2), grid.directions)
    return 0.0 if np.all(regularity_proxy(grid, h) > 0) else math.inf


def tau_sigma_bounds(rng, cfg):
    if cfg.n != 2:
        return 0.0
    K = _random_body(rng)
    ok = 0 < tau_body(K) < sigma_body(K) < 2 * math.pi and tau_body(K) < math.pi
    return 0.0 if ok else math.inf


PROPERTIES = {
    "chart_roundtrip": (chart_roundtrip, 1e-12),
    "chart_height": (chart_height, 1e-12),
    "discrete_chart_identity": (discrete_chart_identity, 1e-12),
    "discrete_equivariance": (discrete_equivariance, 1e-12),
    "region_equivariance": (region_equivariance, 1e-9),
    "gamma_f_equivalence": (gamma_f_equivalence, 1e-10),
    "gamma_tilde_identity": (gamma_tilde_identity, 1e-9),
    "radial_monotonicity": (radial_monotonicity, 0.0),
    "segment_inclusion": (segment_inclusion, 1e-12),
    "boundary_characterization": (boundary_characterization, 1e-6),
    "gamma_s_equivariance": (gamma_s_equivariance, 1e-5),
    "polar_hausdorff": (polar_hausdorff, 1e-9),
    "measure_monotonicity": (measure_monotonicity, 0.0),
    "measure_rotation_invariance": (measure_rotation_invariance, 1e-8),
    "cap_injectivity": (cap_injectivity, 0.0),
    "matched_caps_nested": (matched_caps_nested, 1e-12),
    "regularity": (regularity, 0.0),
    "tau_sigma_bounds": (tau_sigma_bounds, 0.0),
}
