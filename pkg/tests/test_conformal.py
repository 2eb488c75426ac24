import json

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schoenflies.conformal import (ConformalMap, ConformalMapError, arc_image, boundary_homeo,
                                   exterior_map, interior_map, verify_exterior_derivative_bounds,
                                   verify_interior_derivative_bounds)
from schoenflies.curves import (CircleEmbedding, circle, ellipse, polygon, polyline_distance,
                                trig_perturbation)
from schoenflies.harmonic import Arc

TWO_PI = 2 * np.pi
SQUARE = [1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]


def disk_points(seed, m=50, rmax=0.95):
    rng = np.random.default_rng(seed)
    return np.sqrt(rng.uniform(0, rmax ** 2, m)) * np.exp(1j * rng.uniform(0, TWO_PI, m))


def square_sc_constant():
    # Schwarz-Christoffel: Phi(z) = C int_0^z (1 - s^4)^(-1/2) ds sends 1 to the corner sqrt(2)
    k = mpmath.quad(lambda s: (1 - s ** 4) ** -0.5, [0, 1])
    return float(mpmath.sqrt(2) / k)


@pytest.fixture(scope="module")
def ellipse_maps():
    f = ellipse(2, 1, 256)
    return f, interior_map(f), exterior_map(f)


def test_unit_circle_maps_are_identity():
    f = circle(0, 1, 64)
    z = disk_points(0)
    np.testing.assert_allclose(interior_map(f).evaluate(z)[0], z, atol=1e-12)
    e = exterior_map(f)
    np.testing.assert_allclose(e.evaluate(1 / np.conj(z))[0], 1 / np.conj(z), atol=1e-9)
    assert e.capacity == pytest.approx(1.0, abs=1e-12)


def test_scaled_circle():
    f = circle(0, 2.5, 64)
    z = disk_points(1)
    w, dw = interior_map(f).evaluate(z)
    np.testing.assert_allclose(w, 2.5 * z, atol=1e-11)
    np.testing.assert_allclose(dw, 2.5, atol=1e-11)
    assert exterior_map(f).capacity == pytest.approx(2.5, rel=1e-12)


def test_shifted_circle_is_disk_automorphism():
    c = 0.5
    m = interior_map(circle(c, 1, 128))
    z = disk_points(2)
    ref = c + (z - c) / (1 - c * z)
    np.testing.assert_allclose(m.evaluate(z)[0], ref, atol=1e-10)


def test_ellipse_exterior_is_joukowski(ellipse_maps):
    _, _, e = ellipse_maps
    z = 1 / np.conj(disk_points(3, rmax=0.8))
    # the polyline is inscribed in the ellipse, so agreement is limited by the chord sag
    np.testing.assert_allclose(e.evaluate(z)[0], 1.5 * z + 0.5 / z, rtol=1e-5, atol=2e-5)
    assert e.capacity == pytest.approx(1.5, rel=1e-4)


def test_thin_ellipse_capacity_tends_to_one():
    cap = exterior_map(ellipse(2, 0.02, 256)).capacity
    assert cap == pytest.approx(1.01, rel=1e-3)
    assert abs(cap - 1) < 0.02


def test_square_conformal_radius_and_capacity():
    C = square_sc_constant()
    f = polygon(SQUARE, 256)
    d0 = interior_map(f).derivative(np.array([0j]))[0]
    assert abs(d0.imag) < 1e-9
    assert d0.real == pytest.approx(C, rel=2e-3)
    cap = float(mpmath.gamma(0.25) ** 2 / (4 * mpmath.pi ** 1.5)) * 2
    assert exterior_map(f).capacity == pytest.approx(cap, rel=2e-3)


def test_normalization(ellipse_maps):
    _, m, e = ellipse_maps
    w, dw = m.evaluate(np.array([0j]))
    assert abs(w[0]) < 1e-12 and abs(dw[0].imag) < 1e-12 and dw[0].real > 0
    for R in (1e2, 1e3, 1e4):
        big = R * np.exp(1j * np.array([0.3, 2.0, 4.0]))
        # Joukowski: Phi(z)/z - c = 0.5 / z^2
        assert np.max(np.abs(e.evaluate(big)[0] / big - e.capacity)) < 1.0 / R ** 2


def test_boundary_table_on_curve(ellipse_maps):
    f, m, e = ellipse_maps
    for cmap in (m, e):
        t, w = cmap.boundary_table
        assert len(t) == f.n
        assert np.max(polyline_distance(w, f.values)) <= 1e-6 * f.diam


def test_inverse_roundtrip(ellipse_maps):
    _, m, e = ellipse_maps
    z = disk_points(4, rmax=0.9)
    np.testing.assert_allclose(m.inverse(m.evaluate(z)[0]), z, atol=1e-9)
    ze = 1 / np.conj(z)
    np.testing.assert_allclose(e.inverse(e.evaluate(ze)[0]), ze, atol=1e-9)


def test_derivative_matches_finite_difference(ellipse_maps):
    _, m, e = ellipse_maps
    h = 1e-6
    for cmap, z in ((m, disk_points(5, 10, 0.9)), (e, 1 / np.conj(disk_points(6, 10, 0.9)))):
        w, dw = cmap.evaluate(z)
        fd = (cmap.evaluate(z + h)[0] - cmap.evaluate(z - h)[0]) / (2 * h)
        np.testing.assert_allclose(dw, fd, rtol=1e-6)


def test_odd_symmetry_for_symmetric_curves():
    f = trig_perturbation(n=128)
    assert f.symmetric
    m = interior_map(f)
    z = disk_points(7)
    np.testing.assert_allclose(m.evaluate(-z)[0], -m.evaluate(z)[0], atol=1e-14)


def test_json_roundtrip(ellipse_maps):
    _, m, e = ellipse_maps
    for cmap in (m, e):
        back = ConformalMap.from_json(json.loads(json.dumps(cmap.to_json())))
        z = disk_points(8) if cmap.kind == "interior" else 1 / np.conj(disk_points(8))
        np.testing.assert_array_equal(back.evaluate(z)[0], cmap.evaluate(z)[0])


def test_clockwise_and_wrong_center_rejected():
    f = circle(0, 1, 64)
    cw = CircleEmbedding(f.t, np.conj(f.values))
    with pytest.raises(ConformalMapError):
        interior_map(cw)
    with pytest.raises(ConformalMapError):
        interior_map(circle(3, 1, 64))


def test_boundary_homeo_of_identity():
    f = circle(0, 1, 64)
    chi = boundary_homeo(interior_map(f), f)
    x = np.linspace(0, TWO_PI, 100)
    np.testing.assert_allclose(chi(x), x, atol=1e-9)


def test_arc_image_lies_on_curve(ellipse_maps):
    f, m, _ = ellipse_maps
    pts = arc_image(m, Arc(0.1, 1.1))
    assert np.max(polyline_distance(pts, f.values)) < 1e-9


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(-np.pi, np.pi))
def test_interior_sandwiches_hold(r, th):
    f = ellipse(2, 1, 256)
    m = _cached(f, "interior")
    for c in verify_interior_derivative_bounds(m, f, r * np.exp(1j * th)):
        assert c.margin >= -1e-6 * max(abs(c.lhs), abs(c.rhs)), c


@settings(max_examples=15, deadline=None)
@given(st.floats(1.05, 600.0), st.floats(-np.pi, np.pi))
def test_exterior_sandwiches_hold(R, th):
    f = ellipse(2, 1, 256)
    e = _cached(f, "exterior")
    for c in verify_exterior_derivative_bounds(e, f, R * np.exp(1j * th)):
        assert c.margin >= -1e-6 * max(abs(c.lhs), abs(c.rhs)), c


_CACHE = {}


def _cached(f, kind):
    key = (f.name, kind)
    if key not in _CACHE:
        _CACHE[key] = interior_map(f) if kind == "interior" else exterior_map(f)
    return _CACHE[key]
