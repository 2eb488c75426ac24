import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schoenflies.curves import CurveError
from schoenflies.harmonic import (Arc, HarmonicMeasureResult, bn_lower, bn_upper, check_bncor,
                                  gamma_arcs, hm_disk_closed_form, hm_disk_exact,
                                  hm_exterior_exact, hm_monte_carlo, poisson_kernel)

TWO_PI = 2 * np.pi
inside_disk = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0.0, 0.95), st.floats(-np.pi, np.pi))


def test_gamma_arcs_substitution():
    g = gamma_arcs(np.exp(-1))
    assert [(a.t_lo, a.t_hi) for a in g] == [(-2, -1), (-1, -0.5), (0.5, 1), (1, 2)]
    gr = gamma_arcs(np.exp(-1) * 1j)
    for a, b in zip(g, gr):
        assert b.t_lo == pytest.approx(a.t_lo + np.pi / 2)
        assert b.t_hi == pytest.approx(a.t_hi + np.pi / 2)
    g = gamma_arcs(np.exp(-0.1))
    assert g[0].length == pytest.approx(0.1) and g[1].length == pytest.approx(0.05)
    for z in (0, 1, 1j):
        with pytest.raises(ValueError):
            gamma_arcs(z)


def test_poisson_kernel_values():
    assert poisson_kernel(0, 1j) == pytest.approx(1 / TWO_PI)
    assert poisson_kernel(0.5, 1) == pytest.approx(3 / TWO_PI)
    assert poisson_kernel(0.5, -1) == pytest.approx(1 / (6 * np.pi))


def test_disk_exact_at_center_is_normalized_length():
    for s in (0.1, 1.0, np.pi, 6.0):
        assert hm_disk_exact(0, Arc(0.3, 0.3 + s)).value == pytest.approx(s / TWO_PI, abs=1e-12)


def test_arc_validation():
    with pytest.raises(ValueError):
        Arc(1.0, 0.5)
    with pytest.raises(ValueError):
        Arc(0, 7.0)


@settings(max_examples=60, deadline=None)
@given(inside_disk, st.floats(-np.pi, np.pi), st.floats(0.01, TWO_PI - 0.01))
def test_disk_exact_matches_angle_formula(z, lo, s):
    arc = Arc(lo, lo + s)
    assert hm_disk_exact(z, arc).value == pytest.approx(hm_disk_closed_form(z, arc), abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(inside_disk, st.lists(st.floats(0.05, 1.0), min_size=2, max_size=7), st.floats(-np.pi, np.pi))
def test_partition_sums_to_one(z, gaps, start):
    cuts = start + TWO_PI * np.concatenate([[0], np.cumsum(gaps)]) / sum(gaps)
    total = sum(hm_disk_exact(z, Arc(a, b)).value for a, b in zip(cuts[:-1], cuts[1:]))
    assert total == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(inside_disk, st.floats(-np.pi, np.pi), st.floats(0.01, 3.0), st.floats(0.0, 3.0))
def test_monotone_in_arc(z, lo, s, extra):
    a = hm_disk_exact(z, Arc(lo, lo + s)).value
    b = hm_disk_exact(z, Arc(lo, lo + s + extra)).value
    assert b >= a - 1e-12


def test_lower_bounds_on_four_arcs_example():
    z = np.exp(-0.5)
    g = gamma_arcs(z)
    assert hm_disk_exact(z, g[3]).value >= 1 / (30 * np.pi)
    assert hm_disk_exact(z, g[0]).value >= 1 / (30 * np.pi)


def test_exterior_far_point_limit():
    arc = Arc(0.2, 1.7)
    assert hm_exterior_exact(1e6 * np.exp(0.4j), arc).value == pytest.approx(1.5 / TWO_PI, abs=1e-6)
    with pytest.raises(ValueError):
        hm_exterior_exact(0.5, arc)


def test_exterior_lower_bound_middle_arcs():
    R = np.e
    g = gamma_arcs(R)
    for j in (1, 2):
        assert hm_exterior_exact(R, g[j]).value >= 1 / (64 * np.pi)


@settings(max_examples=40, deadline=None)
@given(st.floats(1.05, 20), st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi), st.floats(0.01, 6))
def test_exterior_reflection_symmetry(r, th, lo, s):
    z = r * np.exp(1j * th)
    arc = Arc(lo, lo + s)
    a = hm_exterior_exact(z, arc).value
    b = hm_exterior_exact(np.conj(z), arc.reflected()).value
    assert a == pytest.approx(b, abs=1e-12)
    # independent oracle: the Poisson kernel of the exterior, evaluated directly
    t = np.linspace(lo, lo + s, 20001)
    dens = (abs(z) ** 2 - 1) / (TWO_PI * np.abs(np.exp(1j * t) - z) ** 2)
    ref = np.trapezoid(dens, t)
    assert a == pytest.approx(ref, abs=1e-6)


def test_bn_bounds_arithmetic():
    assert bn_lower(0, 2.0) == pytest.approx(1.0)
    assert bn_lower(1 / 3, 1.0) == pytest.approx(1 / 3)
    assert bn_upper(3.0, 1.0) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        bn_lower(2, 1)
    with pytest.raises(ValueError):
        bn_upper(0.5, 1)


# --- Monte Carlo --------------------------------------------------------------------

def _unit_circle(n=512):
    return np.exp(1j * TWO_PI * np.arange(n) / n)


def test_mc_half_circle_from_center():
    v = _unit_circle()
    mid = np.angle(0.5 * (v + np.roll(v, -1)))
    r = hm_monte_carlo(v, mid > 0, 0.0, walks=20_000, seed=3)
    assert r.method == "monte-carlo" and r.walks == 20_000 and r.std_error > 0
    assert abs(r.value - 0.5) <= 3 * r.std_error


def test_mc_agrees_with_exact_on_arc():
    z = np.exp(-0.5)
    arc = gamma_arcs(z)[0]
    v = _unit_circle(512)
    t_mid = np.mod(TWO_PI * (np.arange(512) + 0.5) / 512 - arc.t_lo, TWO_PI)
    mask = t_mid <= arc.length
    r = hm_monte_carlo(v, mask, z, walks=20_000, seed=5)
    exact = hm_disk_exact(z, arc).value
    # polygon vs circle and the absorption layer are both well inside the band
    assert abs(r.value - exact) <= 3 * r.std_error + 2e-3


def test_mc_square_side_from_center():
    v = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])
    r = hm_monte_carlo(v, np.array([True, False, False, False]), 0.0, walks=20_000, seed=1)
    assert abs(r.value - 0.25) <= 3 * r.std_error


def test_mc_exterior_matches_exact():
    z = 1.8 * np.exp(0.3j)
    arc = Arc(-0.5, 1.0)
    v = _unit_circle(512)
    t_mid = np.mod(TWO_PI * (np.arange(512) + 0.5) / 512 - arc.t_lo, TWO_PI)
    r = hm_monte_carlo(v, t_mid <= arc.length, z, walks=20_000, seed=7)
    assert abs(r.value - hm_exterior_exact(z, arc).value) <= 3 * r.std_error + 2e-3


def test_mc_is_deterministic_and_validates():
    v = _unit_circle(64)
    mask = np.arange(64) < 16
    a = hm_monte_carlo(v, mask, 0.2, walks=5000, seed=9)
    b = hm_monte_carlo(v, mask, 0.2, walks=5000, seed=9)
    assert a == b
    with pytest.raises(CurveError):
        hm_monte_carlo(np.array([1 + 1j, -1 - 1j, 1 - 1j, -1 + 1j]), mask[:4], 0.0, walks=5000)
    with pytest.raises(ValueError):
        hm_monte_carlo(v, mask, 0.2, walks=10)


def test_mc_callable_target():
    v = _unit_circle(256)
    r = hm_monte_carlo(v, lambda p: p.real > 0, 0.0, walks=10_000, seed=2)
    assert abs(r.value - 0.5) <= 3 * r.std_error + 5e-3


# --- projection corollary -----------------------------------------------------------

def test_bncor_disk_arc():
    eps = 0.2
    arc = Arc(0, TWO_PI * eps)
    om = hm_disk_exact(0, arc)
    res = check_bncor(0, arc.samples(512), _unit_circle(), om)
    assert [c.name for c in res] == ["BNcor1", "BNcor2"]
    assert all(c.margin > 0 for c in res)


def test_bncor_full_boundary_factor_two():
    v = _unit_circle(256)
    res = check_bncor(0.3, v, v, HarmonicMeasureResult(1.0, "poisson-exact"))
    c1 = res[0]
    assert c1.rhs == pytest.approx(2 * c1.lhs, rel=1e-3)
    assert c1.margin > 0
    with pytest.raises(ValueError):
        check_bncor(0, v, v, HarmonicMeasureResult(0.0, "poisson-exact"))
