import math

import numpy as np
import pytest

from oracles import geodesic_polygon_area, radial_integral
from sphereoid.bodies import SphericalBody, cap_body
from sphereoid.convex import Ball, convex_hull, scaled
from sphereoid.errors import TargetOutOfRange
from sphereoid.experiments import random_symmetric_body
from sphereoid.gnomonic import WeightedDensity, unproject
from sphereoid.measures import (cap_measure, match_ball, match_cap, measure_chart_body, sigma_body,
                                tau_body)
from sphereoid.sphere import SphericalCap, random_rotation

E = np.array([0.0, 0.0, 1.0])
RADII = np.round(np.arange(0.1, 1.41, 0.1), 10)


@pytest.mark.parametrize("r", RADII)
def test_cap_closed_forms(r):
    K = cap_body(SphericalCap(E, r))
    assert sigma_body(K) == pytest.approx(2 * math.pi * (1 - math.cos(r)), rel=1e-12)
    assert tau_body(K) == pytest.approx(math.pi * math.sin(r) ** 2, rel=1e-12)


def test_cap_measure_example_and_limits():
    assert cap_measure(math.pi / 3) == pytest.approx(math.pi, rel=1e-15)
    assert cap_measure(math.pi / 2) == pytest.approx(2 * math.pi)
    assert cap_measure(math.pi / 2, "tau") == pytest.approx(math.pi)
    assert cap_measure(0.0) == 0.0
    # the dimension-generic path agrees with the planar closed forms
    for r in (0.2, 0.9):
        R = math.tan(r)
        xi = 2 * math.pi * radial_integral(WeightedDensity("xi").profile, 1, R)
        assert cap_measure(r) == pytest.approx(xi, rel=1e-12)


def test_cap_measure_three_sphere():
    # area(S^2) * integral of sin^2 t over [0, r]
    for r in (0.3, 1.1):
        exact = 4 * math.pi * (r / 2 - math.sin(2 * r) / 4)
        assert cap_measure(r, "sigma", 3) == pytest.approx(exact, rel=1e-9)


def test_geodesic_polygon_measure(rng):
    for _ in range(10):
        K = random_symmetric_body(rng, int(rng.integers(3, 9)), float(rng.uniform(0, 0.9)))
        verts = unproject(K.frame, K.image.vertices)
        exact = geodesic_polygon_area(verts, K.center)
        assert sigma_body(K) == pytest.approx(exact, rel=1e-11)


def test_monte_carlo_cap_measures():
    rng = np.random.default_rng(7)
    m = 10 ** 6
    u = rng.standard_normal((m, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    for r in (0.4, 1.2):
        inside = u @ E >= math.cos(r)
        p = inside.mean()
        est, sd = 4 * math.pi * p, 4 * math.pi * math.sqrt(p * (1 - p) / m)
        assert abs(est - cap_measure(r)) < 3 * sd
        w = 4 * math.pi * np.where(inside, u @ E, 0.0)
        assert abs(w.mean() - cap_measure(r, "tau")) < 3 * w.std() / math.sqrt(m)


def test_monotone_and_rotation_invariant(rng):
    K = random_symmetric_body(rng, 6, 0.6)
    M = SphericalBody(K.center, scaled(K.image, 1.1))
    assert sigma_body(K) < sigma_body(M)
    assert tau_body(K) < tau_body(M) < sigma_body(M)
    t = random_rotation(rng, 3)
    assert sigma_body(K.rotated(t)) == pytest.approx(sigma_body(K), rel=1e-10)
    assert tau_body(K.rotated(t)) == pytest.approx(tau_body(K), rel=1e-10)


def test_match_cap():
    K = cap_body(SphericalCap(E, math.pi / 3))
    assert match_cap(K, "sigma").cap.radius == pytest.approx(math.pi / 3, rel=1e-14)
    # a body with tau = pi/4 matches the cap of radius pi/6
    sq = convex_hull(np.array([[1, 1], [-1, 1], [-1, -1], [1, -1.0]]))
    lo, hi = 0.01, 1.0
    for _ in range(100):
        k = 0.5 * (lo + hi)
        if tau_body(SphericalBody(E, scaled(sq, k))) < math.pi / 4:
            lo = k
        else:
            hi = k
    mc = match_cap(SphericalBody(E, scaled(sq, k)), "tau")
    assert mc.cap.radius == pytest.approx(math.pi / 6, abs=1e-10)
    with pytest.raises(ValueError):
        match_cap(K, "volume")


def test_matched_caps_nested(rng):
    for _ in range(5):
        K = random_symmetric_body(rng, 7, 0.8)
        t, s = match_cap(K, "tau"), match_cap(K, "sigma")
        assert t.cap.radius < s.cap.radius
        assert abs(t.residual) < 1e-12 and abs(s.residual) < 1e-12
        np.testing.assert_array_equal(t.cap.center, K.center)


def test_match_ball():
    sq = convex_hull(np.array([[1, 1], [-1, 1], [-1, -1], [1, -1.0]]))
    leb = WeightedDensity("lebesgue")
    assert match_ball(sq, leb).radius == pytest.approx(2 / math.sqrt(math.pi), rel=1e-13)
    # a ball matched in the chart for tau is the chart image of the tau-matched cap
    rng = np.random.default_rng(3)
    K = random_symmetric_body(rng, 6, 0.5)
    B = match_ball(K.image, WeightedDensity("psi"))
    assert math.atan(B.radius) == pytest.approx(match_cap(K, "tau").cap.radius, rel=1e-10)
    assert match_ball(Ball(0.7), leb).radius == 0.7
    assert measure_chart_body(B.ball, WeightedDensity("psi")) == pytest.approx(tau_body(K), rel=1e-12)


def test_target_out_of_range():
    # the psi measure of the whole plane is pi; a huge square rounds up to it
    big = convex_hull(np.array([[1, 1], [-1, 1], [-1, -1], [1, -1.0]]) * 1e12)
    with pytest.raises(TargetOutOfRange):
        match_ball(big, WeightedDensity("psi"))
