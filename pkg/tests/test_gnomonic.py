import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import radial_integral
from sphereoid.errors import HemisphereViolation, UnsupportedPower
from sphereoid.gnomonic import (TangentFrame, WeightedDensity, chart_transform, gauss_legendre_adaptive,
                                project, radial_primitive, radial_primitive_inverse,
                                radial_primitive_limit, unproject)
from sphereoid.sphere import random_rotation

E = np.array([0.0, 0.0, 1.0])


def hemisphere_points(rng, m, e=E):
    v = rng.standard_normal((m, len(e)))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    v = np.where((v @ e)[:, None] < 0, -v, v)
    return v[v @ e > 1e-3]


def test_project_examples():
    f = TangentFrame.at(E)
    np.testing.assert_allclose(project(f, E), [0, 0])
    u = np.array([1.0, 0.0, 1.0]) / math.sqrt(2)
    assert np.linalg.norm(project(f, u)) == pytest.approx(1.0)
    with pytest.raises(HemisphereViolation):
        project(f, [1.0, 0.0, 0.0])
    with pytest.raises(HemisphereViolation):
        project(f, -E)


def test_roundtrip_and_height(rng):
    for dim in (3, 4):
        e = np.zeros(dim)
        e[0] = 1.0
        f = TangentFrame.at(e)
        u = hemisphere_points(rng, 1000, e)
        x = project(f, u)
        assert np.max(np.abs(unproject(f, x) - u)) < 1e-12
        phi = WeightedDensity("phi", dim - 1)(x)
        assert np.max(np.abs(phi - u @ e)) < 1e-12


def test_frame_validation():
    with pytest.raises(ValueError):
        TangentFrame(E, np.eye(3)[:2] * 2)
    f = TangentFrame.at(E)
    g = TangentFrame.from_json(f.to_json())
    np.testing.assert_array_equal(g.basis, f.basis)
    np.testing.assert_array_equal(f.antipodal().center, -E)


def test_chart_transform_is_orthogonal(rng):
    f = TangentFrame.at(E)
    for _ in range(10):
        t = random_rotation(rng, 3)
        g = TangentFrame.at(t.matrix @ E)
        q = chart_transform(f, g, t.matrix)
        np.testing.assert_allclose(q @ q.T, np.eye(2), atol=1e-12)
        u = hemisphere_points(rng, 5)
        np.testing.assert_allclose(project(g, u @ t.matrix.T), project(f, u) @ q.T, atol=1e-10)


def test_density_values():
    x = np.array([[0.0, 0.0], [1.0, 0.0]])
    np.testing.assert_allclose(WeightedDensity("xi")(x), [1, 2 ** -1.5])
    np.testing.assert_allclose(WeightedDensity("psi")(x), [1, 0.25])
    np.testing.assert_allclose(WeightedDensity("phi")(x), [1, 2 ** -0.5])
    np.testing.assert_allclose(WeightedDensity("lebesgue")(x), [1, 1])
    with pytest.raises(ValueError):
        WeightedDensity("gauss")


@given(st.lists(st.floats(-5, 5), min_size=2, max_size=2))
def test_psi_is_phi_times_xi(x):
    x = np.asarray(x)
    assert WeightedDensity("psi")(x) == pytest.approx(WeightedDensity("phi")(x) * WeightedDensity("xi")(x),
                                                      rel=1e-14)


@pytest.mark.parametrize("kind", ["xi", "psi", "phi", "lebesgue"])
@pytest.mark.parametrize("dim", [2, 3, 4])
def test_radial_primitive_matches_quad(kind, dim):
    d = WeightedDensity(kind, dim)
    for p in (dim - 1, dim):
        for rho in (1e-6, 0.01, 0.5, 1.0, 3.0, 40.0, 2e6):
            got = radial_primitive(d, p, rho)
            want = radial_integral(d.profile, p, rho) if rho < 1e3 else None
            if want is not None:
                assert got == pytest.approx(want, rel=1e-10, abs=1e-300)
    assert radial_primitive(d, dim - 1, 0.0) == 0.0


def test_closed_forms_n2():
    rho = np.tan(0.7)
    assert radial_primitive(WeightedDensity("xi"), 1, rho) == pytest.approx(1 - math.cos(0.7), rel=1e-14)
    assert radial_primitive(WeightedDensity("psi"), 1, rho) == pytest.approx(math.sin(0.7) ** 2 / 2, rel=1e-14)


def test_unsupported_power():
    with pytest.raises(UnsupportedPower):
        radial_primitive(WeightedDensity("xi"), 3, 1.0)


def test_limits():
    assert radial_primitive_limit(WeightedDensity("xi"), 1) == pytest.approx(1.0)
    assert radial_primitive_limit(WeightedDensity("psi"), 1) == pytest.approx(0.5)
    assert radial_primitive_limit(WeightedDensity("phi"), 1) == math.inf
    assert radial_primitive_limit(WeightedDensity("xi"), 2) == math.inf
    d3 = WeightedDensity("xi", 3)
    assert radial_primitive_limit(d3, 2) == pytest.approx(radial_integral(d3.profile, 2, 1e7), rel=1e-6)


@settings(max_examples=40)
@given(st.sampled_from(["xi", "psi", "phi", "lebesgue"]), st.sampled_from([2, 3]), st.floats(1e-3, 50))
def test_inverse_roundtrip(kind, dim, rho):
    d = WeightedDensity(kind, dim)
    v = radial_primitive(d, dim - 1, rho)
    assert radial_primitive_inverse(d, dim - 1, v) == pytest.approx(rho, rel=1e-9)


def test_inverse_out_of_range():
    with pytest.raises(ValueError):
        radial_primitive_inverse(WeightedDensity("psi"), 1, 0.5)
    with pytest.raises(ValueError):
        radial_primitive_inverse(WeightedDensity("xi"), 1, -0.1)


def test_adaptive_quadrature():
    assert gauss_legendre_adaptive(np.sin, 0, math.pi) == pytest.approx(2.0, rel=1e-13)
    assert gauss_legendre_adaptive(np.sqrt, 0, 1) == pytest.approx(2 / 3, rel=1e-10)
