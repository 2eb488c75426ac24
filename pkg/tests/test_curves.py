import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.distance import cdist

from schoenflies.curves import (CircleEmbedding, CurveError, bilipschitz_constants, bowtie, circle,
                                ellipse, embedding_constants, find_self_intersection, incenter,
                                inside, make_embedding, polygon, polyline_distance, set_diam,
                                set_dist, trig_perturbation, winding_number)

TWO_PI = 2 * np.pi


def crossing_parity(v, p):
    """Even-odd ray casting, independent of the winding-angle sum."""
    a, b = v, np.roll(v, -1)
    hits = 0
    for x, y in zip(a, b):
        if (x.imag > p.imag) != (y.imag > p.imag):
            xc = x.real + (p.imag - x.imag) * (y.real - x.real) / (y.imag - x.imag)
            hits += xc > p.real
    return hits % 2 == 1


def star(angles, radii):
    return np.asarray(radii) * np.exp(1j * np.asarray(angles))


star_polygons = st.integers(5, 12).flatmap(lambda k: st.tuples(
    st.lists(st.floats(0.2, 1.0), min_size=k, max_size=k),
    st.lists(st.floats(0.3, 1.0), min_size=k, max_size=k)))


def _star_from(gaps_radii):
    gaps, radii = gaps_radii
    g = np.asarray(gaps)
    ang = np.cumsum(g) / g.sum() * TWO_PI
    return star(ang, radii)


# --- construction -------------------------------------------------------------------

def test_circle_nodes_and_symmetry():
    f = circle(0, 2.0, 64)
    assert f.symmetric and f.n == 64
    np.testing.assert_allclose(np.abs(f.values), 2.0, rtol=1e-15)
    np.testing.assert_allclose(f.values[32:], -f.values[:32], atol=0)


def test_regular_polygon_diameter_is_twice_radius():
    assert set_diam(circle(0, 1.5, 64).values) == pytest.approx(3.0, rel=1e-14)


def test_counterclockwise_and_area():
    sq = polygon([1, 1j, -1, -1j], n=64)
    assert sq.counterclockwise
    assert sq.signed_area() == pytest.approx(2.0, rel=1e-12)
    assert not CircleEmbedding(sq.t, np.conj(sq.values)).counterclockwise


def test_rejects_bad_input():
    t = TWO_PI * np.arange(4) / 4
    with pytest.raises(CurveError):
        CircleEmbedding(t, np.array([1, 1, -1, -1j]))
    with pytest.raises(CurveError, match="self-intersects"):
        CircleEmbedding(t, np.array([1 + 1j, -1 - 1j, 1 - 1j, -1 + 1j]))
    with pytest.raises(CurveError):
        CircleEmbedding(t[::-1], np.array([1, 1j, -1, -1j]))
    with pytest.raises(CurveError):
        circle(n=8)
    with pytest.raises(CurveError):
        make_embedding({"family": "spiral"})


def test_symmetric_flag_is_checked():
    f = trig_perturbation(0.1, 3, 0.1, 2, 64)
    assert not f.symmetric
    with pytest.raises(CurveError):
        CircleEmbedding(f.t, f.values, symmetric=True)


def test_evaluation_is_piecewise_linear():
    f = circle(0, 1, 16)
    s = 0.5 * (f.t[3] + f.t[4])
    assert f(np.array([s]))[0] == pytest.approx(0.5 * (f.values[3] + f.values[4]))
    assert f(np.array([f.t[5] + TWO_PI]))[0] == pytest.approx(f.values[5])


def test_refined_is_same_map():
    f = ellipse(2, 1, 64)
    s = np.linspace(0, TWO_PI, 501)
    np.testing.assert_allclose(f.refined(3)(s), f(s), atol=1e-14)
    assert f.refined(3).symmetric


def test_json_roundtrip():
    f = trig_perturbation(n=64)
    g = make_embedding(f.to_json())
    np.testing.assert_array_equal(g.t, f.t)
    np.testing.assert_array_equal(g.values, f.values)
    assert g.symmetric == f.symmetric


def test_family_specs():
    assert make_embedding({"family": "circle", "params": {"R": 2, "c": [1, 0]}}, 32).values[0] == 3
    assert make_embedding({"family": "bowtie", "params": {"eps": 0.2}, "n": 128}).n == 128


def test_bowtie_waist_points():
    eps = 0.1
    f = bowtie(eps, 256)
    a, b = f(np.array([-eps / 2, eps / 2]))
    assert a == pytest.approx(0.5j * eps, abs=1e-12)
    assert b == pytest.approx(-0.5j * eps, abs=1e-12)


def test_bowtie_upper_constant_scales_like_inverse_width():
    # the left lobe (perimeter 1) is traced over a parameter arc of length eps
    for eps in (0.1, 0.05):
        L = embedding_constants(bowtie(eps, 256), refine=2).upper_L
        assert 0.5 < L * eps < 2


# --- distances ----------------------------------------------------------------------

def test_set_dist_matches_brute_force():
    rng = np.random.default_rng(0)
    a = rng.normal(size=300) + 1j * rng.normal(size=300)
    b = rng.normal(size=200) + 1j * rng.normal(size=200) + 3
    ref = cdist(np.c_[a.real, a.imag], np.c_[b.real, b.imag]).min()
    assert set_dist(a, b, block=64) == pytest.approx(ref, rel=1e-14)
    refd = cdist(np.c_[a.real, a.imag], np.c_[a.real, a.imag]).max()
    assert set_diam(a, block=64) == pytest.approx(refd, rel=1e-14)


def test_center_to_regular_polygon_is_apothem():
    for n in (12, 64):
        d = polyline_distance([0.0], np.exp(1j * TWO_PI * np.arange(n) / n))[0]
        assert d == pytest.approx(np.cos(np.pi / n), rel=1e-14)


def test_find_self_intersection_on_figure_eight():
    assert find_self_intersection(np.array([1 + 1j, -1 - 1j, 1 - 1j, -1 + 1j])) is not None
    assert find_self_intersection(circle(0, 1, 64).values) is None


def test_ellipse_chord_ratios_are_semi_axes():
    # restriction of a linear map: horizontal chords stretch by a, vertical by b
    c = embedding_constants(ellipse(2, 1, 256), refine=1)
    assert c.upper_L == pytest.approx(2.0, rel=1e-12)
    assert c.lower_l == pytest.approx(1.0, rel=1e-12)


def test_bilipschitz_random_strategy_brackets_all_pairs():
    f = trig_perturbation(n=128)
    full = bilipschitz_constants(f.domain_points, f.values, strategy="all-pairs")
    rnd = bilipschitz_constants(f.domain_points, f.values, strategy="random", budget=2000)
    assert rnd.upper_L <= full.upper_L and rnd.lower_l >= full.lower_l
    assert full.num_pairs_tested == 128 * 127 // 2


def test_incenter_of_ellipse():
    rep = incenter(ellipse(2, 1, 256))
    assert abs(rep.center) < 1e-6
    assert rep.radius == pytest.approx(1.0, abs=1e-3)


def test_winding_number_point_on_curve_raises():
    with pytest.raises(CurveError):
        winding_number(circle(0, 1, 64), 1.0)


# --- properties -----------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(star_polygons, st.floats(0, TWO_PI), st.floats(0.1, 10))
def test_constants_scale_with_similarities(gr, theta, s):
    f = polygon(_star_from(gr), n=64)
    c0 = embedding_constants(f, refine=1)
    c1 = embedding_constants(f.scaled(s * np.exp(1j * theta)), refine=1)
    assert c1.upper_L == pytest.approx(s * c0.upper_L, rel=1e-9)
    assert c1.lower_l == pytest.approx(s * c0.lower_l, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(star_polygons, st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_winding_agrees_with_ray_casting(gr, p):
    v = _star_from(gr)
    if polyline_distance([p], v)[0] < 1e-6:
        return
    w = winding_number(v, p)
    assert w in (0, 1)
    assert (w == 1) == crossing_parity(v, p) == bool(inside(v, [p])[0])


@settings(max_examples=30, deadline=None)
@given(star_polygons, st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_polyline_distance_bounded_by_vertex_distance(gr, p):
    v = _star_from(gr)
    d = polyline_distance([p], v)[0]
    assert 0 <= d <= np.abs(v - p).min() + 1e-15
    # a dense resampling of the segments approaches it from above
    lam = np.linspace(0, 1, 512)[:, None]
    dense = (v + lam * (np.roll(v, -1) - v)).ravel()
    assert d <= np.abs(dense - p).min() + 1e-12
    assert np.abs(dense - p).min() - d < set_diam(v) / 256
