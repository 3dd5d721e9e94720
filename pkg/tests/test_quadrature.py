import math

import numpy as np
import pytest
from scipy import integrate

from sphereoid.convex import HalfSpace, clip_polygon, convex_hull, regular_polygon
from sphereoid.gnomonic import WeightedDensity
from sphereoid.quadrature import StarPolygon, disk_halfplane_integrals, polygon_integrals

PSI = WeightedDensity("psi")
XI = WeightedDensity("xi")
LEB = WeightedDensity("lebesgue")

# psi-centroid of [-1, 1]^2 cut to x >= 1/4, by scipy.dblquad; frozen
PSI_SQUARE_CUT_MASS = 0.5598862630564898
PSI_SQUARE_CUT_CX = 0.5573219123178054
# xi-mass of [-1, 1]^2 (a sixth of the sphere, by symmetry of the cube)
XI_SQUARE_MASS = 2 * math.pi / 3


def test_square_masses():
    sq = np.array([[1, -1], [1, 1], [-1, 1], [-1, -1.0]])
    m, mom = polygon_integrals(sq, LEB)
    assert m == pytest.approx(4.0, rel=1e-14)
    np.testing.assert_allclose(mom, 0, atol=1e-14)
    assert polygon_integrals(sq, XI)[0] == pytest.approx(XI_SQUARE_MASS, rel=1e-13)
    cut = np.array([[0.25, -1], [1, -1], [1, 1], [0.25, 1.0]])
    m, mom = polygon_integrals(cut, PSI)
    assert m == pytest.approx(PSI_SQUARE_CUT_MASS, rel=1e-12)
    assert mom[0] / m == pytest.approx(PSI_SQUARE_CUT_CX, rel=1e-12)


def test_origin_outside_polygon_triangle():
    tri = np.array([[1.0, 0.5], [3.0, 0.5], [2.0, 2.5]])
    f = lambda y, x: (1 + x * x + y * y) ** -1.5
    # triangle as a union of two x-slabs
    want = (integrate.dblquad(f, 1, 2, 0.5, lambda x: 0.5 + 2 * (x - 1), epsabs=1e-14)[0]
            + integrate.dblquad(f, 2, 3, 0.5, lambda x: 0.5 + 2 * (3 - x), epsabs=1e-14)[0])
    assert polygon_integrals(tri, XI)[0] == pytest.approx(want, rel=1e-11)


def test_near_tangent_edges():
    # an edge seen almost edge-on from the origin
    poly = np.array([[1e-3, -5.0], [1.0, -5.0], [1.0, 5.0], [1e-3, 5.0]])
    m, _ = polygon_integrals(poly, LEB)
    assert m == pytest.approx(0.999 * 10, rel=1e-12)


@pytest.mark.parametrize("offset", [-0.9, -0.3, 0.0, 0.4, 0.95, 2.0, -2.0])
def test_disk_halfplane(offset):
    R = 1.3
    normal = np.array([math.cos(0.7), math.sin(0.7)])
    m, mom = disk_halfplane_integrals(R, normal, offset, LEB)
    c = max(-R, min(R, offset))
    # area of the kept part of the disk, and its centroid along -normal
    cut = R * R * math.acos(c / R) - c * math.sqrt(R * R - c * c)
    seg = math.pi * R * R - cut
    assert m == pytest.approx(seg, rel=1e-12, abs=1e-14)
    if 0 < seg:
        along = 0.0 if abs(c) >= R else -(2 / 3) * (R * R - c * c) ** 1.5
        np.testing.assert_allclose(mom, along * normal, atol=1e-12)


def test_star_polygon_halfplanes_match_clipping(rng):
    L = convex_hull(np.vstack([regular_polygon(1.2, 7, 0.3).vertices, [[2.0, 0.3]]]))
    star = StarPolygon(L.vertices, PSI)
    assert star.mass == pytest.approx(polygon_integrals(L.vertices, PSI)[0], rel=1e-13)
    for ang in rng.uniform(0, 2 * math.pi, 20):
        u = np.array([math.cos(ang), math.sin(ang)])
        m, mom = star.halfplane_moments(u)
        m2, mom2 = polygon_integrals(clip_polygon(L.vertices, HalfSpace.through_origin(u)), PSI)
        assert m[0] == pytest.approx(m2, rel=1e-12)
        np.testing.assert_allclose(mom[0], mom2, rtol=1e-11, atol=1e-14)


def test_star_polygon_rejects_exterior_origin():
    with pytest.raises(ValueError):
        StarPolygon(np.array([[1.0, 0], [2, 0], [2, 1]]), LEB)
