import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import brute_support, qhull_polygon_area
from sphereoid.convex import (Ball, DirectionGrid, EuclidBody, HalfSpace, body_from_json,
                              body_from_supports, clip_polygon, contains, convex_hull, euclid_hausdorff,
                              linear_image, polar, radial, regular_polygon, support)
from sphereoid.errors import DegenerateHull, InfeasibleSupports, OriginNotInterior

SQUARE = np.array([[1, 1], [-1, 1], [-1, -1], [1, -1.0]])
point_clouds = arrays(np.float64, st.tuples(st.integers(3, 40), st.just(2)),
                      elements=st.floats(-10, 10, allow_nan=False))


def test_square_hull_support_radial_polar():
    sq = convex_hull(SQUARE)
    assert sq.symmetric and len(sq.vertices) == 4
    assert support(sq, [1.0, 0.0]) == 1.0
    assert support(sq, np.array([1.0, 1.0]) / math.sqrt(2)) == pytest.approx(math.sqrt(2))
    assert radial(sq, [1.0, 0.0]) == pytest.approx(1.0)
    assert radial(sq, np.array([1.0, 1.0]) / math.sqrt(2)) == pytest.approx(math.sqrt(2))
    P = polar(sq)
    np.testing.assert_allclose(sorted(map(tuple, np.round(P.vertices, 12))),
                               [(-1, 0), (0, -1), (0, 1), (1, 0)], atol=1e-12)


def test_ball_polar_and_support():
    assert polar(Ball(2.0)).radius == 0.5
    assert support(Ball(2.0), [3.0, 4.0]) == 10.0
    assert radial(Ball(2.0), [0.0, 1.0]) == 2.0


def test_degenerate_inputs():
    with pytest.raises(DegenerateHull):
        convex_hull([[0, 0], [1, 1], [2, 2.0]])
    seg = convex_hull([[1, 1], [-1, -1.0]], allow_degenerate=True)
    assert seg.degenerate and not seg.full_dimensional
    with pytest.raises(OriginNotInterior):
        radial(seg, [1.0, 0.0])


def test_origin_not_interior():
    tri = convex_hull([[1, 0], [2, 0], [1, 1.0]])
    with pytest.raises(OriginNotInterior):
        polar(tri)


def test_hull_keeps_vertex_next_to_near_duplicates():
    pts = np.array([[0.0, 0.0], [6.4e-183, -1.0], [0.0, -1.0], [-1.0, -1.0]])
    L = convex_hull(pts)
    assert len(L.vertices) == 3
    assert support(L, [0.0, 1.0]) == 0.0


@settings(max_examples=60)
@given(point_clouds)
def test_hull_matches_qhull(pts):
    try:
        L = convex_hull(pts)
    except DegenerateHull:
        return
    if qhull_polygon_area(pts) < 1e-6:
        return
    u = DirectionGrid.uniform(2, 64).directions
    np.testing.assert_allclose(support(L, u), brute_support(pts, u), atol=1e-9)
    # counter-clockwise orientation
    v = L.vertices
    area = 0.5 * np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
    assert area == pytest.approx(qhull_polygon_area(pts), rel=1e-9)


@settings(max_examples=40)
@given(point_clouds)
def test_polar_involution(pts):
    sym = np.vstack([pts, -pts])
    try:
        L = convex_hull(sym)
    except DegenerateHull:
        return
    if not L.origin_interior(1e-6):
        return
    u = DirectionGrid.uniform(2, 64).directions
    np.testing.assert_allclose(support(polar(polar(L)), u), support(L, u), rtol=1e-8)
    # h_L(u) * rho_{L polar}(u) = 1
    np.testing.assert_allclose(support(L, u) * radial(polar(L), u), 1.0, rtol=1e-9)


def test_three_dimensional_cube():
    cube = convex_hull(np.array([[a, b, c] for a in (-1, 1) for b in (-1, 1) for c in (-1, 1)], float))
    assert support(cube, [1.0, 0, 0]) == 1.0
    assert radial(cube, np.ones(3) / math.sqrt(3)) == pytest.approx(math.sqrt(3))
    P = polar(cube)
    assert len(P.vertices) == 6
    assert support(P, [1.0, 0, 0]) == pytest.approx(1.0)


def test_grid_closed_under_negation():
    for n, m in ((2, 720), (3, 200)):
        g = DirectionGrid.uniform(n, m)
        d = g.directions
        assert np.all(np.min(np.linalg.norm(d[:, None] + d[None], axis=-1), axis=1) < 1e-12)
    with pytest.raises(ValueError):
        DirectionGrid.uniform(2, 7)


def test_body_from_supports_recovers_polygon():
    L = regular_polygon(1.0, 6)
    g = DirectionGrid.uniform(2, 720)
    R = body_from_supports(g, support(L, g.directions))
    assert euclid_hausdorff(L, R, DirectionGrid.uniform(2, 997 * 2)) < 1e-12
    with pytest.raises(InfeasibleSupports):
        body_from_supports(g, -np.ones(720))


def test_body_from_supports_is_outer_for_disk():
    g = DirectionGrid.uniform(2, 360)
    R = body_from_supports(g, np.ones(360))
    assert np.all(np.linalg.norm(R.vertices, axis=1) >= 1.0 - 1e-12)
    assert np.max(np.linalg.norm(R.vertices, axis=1)) == pytest.approx(1 / math.cos(math.pi / 360))


def test_clip_polygon():
    sq = convex_hull(SQUARE)
    half = clip_polygon(sq.vertices, HalfSpace([-1.0, 0.0], 0.0))
    assert qhull_polygon_area(half) == pytest.approx(2.0)
    assert len(clip_polygon(sq.vertices, HalfSpace([1.0, 0.0], -5.0))) == 0


def test_contains_and_json():
    sq = convex_hull(SQUARE)
    assert list(contains(sq, [[0, 0], [2, 0], [1, 1]])) == [True, False, True]
    again = body_from_json(sq.to_json())
    np.testing.assert_array_equal(again.vertices, sq.vertices)
    assert body_from_json(Ball(0.3).to_json()) == Ball(0.3)


def test_linear_image_reflection_keeps_orientation():
    L = convex_hull(np.array([[2, 0], [0, 1], [-2, 0], [0, -1.0]]))
    R = linear_image(L, np.diag([1.0, -1.0]))
    v = R.vertices
    area = 0.5 * np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
    assert area > 0
