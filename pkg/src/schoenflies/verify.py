"""The named inequality suite: every check evaluated on random configurations and
on the default corpus, aggregated into one report.

Each check is a ``CheckResult`` (lhs <= rhs).  Two-sided inequalities carry a
``_lower``/``_upper`` suffix; the report groups results by name and records the
inequality tag (name without the suffix) as its label.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ba_ext
from .conformal import (exterior_map, verify_exterior_derivative_bounds,
                        verify_interior_derivative_bounds)
from .corpus import DEFAULT_CORPUS, CorpusEntry, prepared_curve
from .curves import CircleEmbedding, polygon, polyline_distance, set_diam
from .extend import GridSpec, extend_plane_symmetric
from .harmonic import (Arc, CheckResult, bn_lower, bn_upper, check_bncor, check_unbounded,
                       gamma_arcs, hm_disk_exact, hm_exterior_exact, hm_monte_carlo,
                       poisson_kernel)
from .symmetrize import (check_cor85, check_inradius, symmetrization_checks, symmetrize_recentred,
                         winding_jacobian_norms)

TWO_PI = 2.0 * np.pi
LOWERHARM_1 = 1.0 / (30 * np.pi)
LOWERHARM_2 = 1.0 / (64 * np.pi)


def corrupted_kernel(z, zeta):
    """Fault-injection hook: a Poisson kernel scaled down by 100."""
    return 0.01 * poisson_kernel(z, zeta)


def _rng(seed, *key):
    return np.random.default_rng(np.random.SeedSequence([int(seed), *key]))


def _sub_seed(seed, *key) -> int:
    return int(np.random.SeedSequence([int(seed), *key]).generate_state(1)[0])


# --- disk arcs -----------------------------------------------------------------------

def lowerharm_checks(count: int = 200, seed: int = 0, kernel=poisson_kernel,
                     exterior: bool = True) -> list[CheckResult]:
    """Lower bounds for the harmonic measure of the four arcs around random points."""
    rng = _rng(seed, 1)
    out = []
    th = rng.uniform(-np.pi, np.pi, (2, count))
    r1 = rng.uniform(np.exp(-np.pi / 4), 1.0, count)
    r2 = np.exp(-rng.uniform(0.0, TWO_PI, count))
    r2 = np.clip(r2, np.exp(-TWO_PI) * (1 + 1e-12), 1 - 1e-12)
    for r, t, pair, bound, name in ((r1, th[0], (0, 3), LOWERHARM_1, "lowerharm1"),
                                    (r2, th[1], (1, 2), LOWERHARM_2, "lowerharm2")):
        for z in r * np.exp(1j * t):
            arcs = gamma_arcs(z)
            for j in pair:
                v = hm_disk_exact(z, arcs[j], kernel=kernel).value
                out.append(CheckResult(name, bound, v, "poisson-exact"))
            if exterior:
                ze = 1.0 / np.conj(z)   # same delta, mirrored across the circle
                arcs = gamma_arcs(ze)
                for j in pair:
                    v = hm_exterior_exact(ze, arcs[j], kernel=kernel).value
                    out.append(CheckResult(name + "e", bound, v, "poisson-exact"))
    return out


def disk_bncor_checks(count: int = 50, seed: int = 0) -> list[CheckResult]:
    """Distance and diameter consequences on the unit disk with exact harmonic measure."""
    rng = _rng(seed, 2)
    circle = np.exp(1j * TWO_PI * np.arange(4096) / 4096)
    out = []
    for _ in range(count):
        zeta = rng.uniform(0, 0.95) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        lo = rng.uniform(-np.pi, np.pi)
        arc = Arc(lo, lo + rng.uniform(0.05, TWO_PI - 0.05))
        om = hm_disk_exact(zeta, arc)
        if om.value <= 0:
            continue
        out += check_bncor(zeta, arc.samples(512), {"polyline": circle}, om)
    return out


# --- random polygons for Monte Carlo ----------------------------------------------------

@dataclass
class PolygonConfig:
    vertices: np.ndarray
    zeta: complex
    rho_in: float     # > |zeta|
    rho_out: float    # < |zeta|


def random_star_polygon(rng, center: complex, rmax: float, k: int) -> np.ndarray:
    # increasing angles with gaps bounded below make the polygon simple
    gaps = rng.uniform(0.3, 1.0, k)
    th = rng.uniform(0, TWO_PI) + TWO_PI * np.cumsum(gaps) / gaps.sum()
    r = rmax * rng.uniform(0.35, 1.0, k)
    return center + r * np.exp(1j * th)


def bn_configurations(count: int = 50, seed: int = 0) -> list[PolygonConfig]:
    """Star-shaped polygons kept away from 0, a point inside and radii on both sides."""
    rng = _rng(seed, 3)
    out = []
    while len(out) < count:
        R0 = rng.uniform(1.0, 3.0)
        c = R0 * np.exp(1j * rng.uniform(-np.pi, np.pi))
        v = random_star_polygon(rng, c, 0.95 * R0, int(rng.integers(5, 13)))
        dc = float(polyline_distance([c], v)[0])
        if dc < 0.05 * R0:
            continue
        zeta = c + rng.uniform(0.0, 0.8) * dc * np.exp(1j * rng.uniform(-np.pi, np.pi))
        a = abs(zeta)
        out.append(PolygonConfig(v, complex(zeta), a * rng.uniform(1.05, 4.0),
                                 a * rng.uniform(0.25, 0.95)))
    return out


def bn_checks(configs, walks: int = 100_000, seed: int = 0) -> list[CheckResult]:
    """Projection-theorem bounds against Monte Carlo harmonic measure (3 sigma one-sided)."""
    out = []
    for i, cfg in enumerate(configs):
        a = abs(cfg.zeta)
        s1 = _sub_seed(seed, 4, i, 1)
        om = hm_monte_carlo(cfg.vertices, lambda p, r=cfg.rho_in: np.abs(p) < r, cfg.zeta,
                            walks, s1)
        out.append(CheckResult("BN1", bn_lower(a, cfg.rho_in), om.value + 3 * om.std_error,
                               "monte-carlo", om.walks, om.std_error, s1))
        s2 = _sub_seed(seed, 4, i, 2)
        om = hm_monte_carlo(cfg.vertices, lambda p, r=cfg.rho_out: np.abs(p) <= r, cfg.zeta,
                            walks, s2)
        out.append(CheckResult("BN2", om.value - 3 * om.std_error, bn_upper(a, cfg.rho_out),
                               "monte-carlo", om.walks, om.std_error, s2))
    return out


def _segment_samples(v, mask, per: int = 16):
    a = v[mask]
    b = np.roll(v, -1)[mask]
    s = np.linspace(0, 1, per, endpoint=False)
    return (a[:, None] + s[None, :] * (b - a)[:, None]).ravel()


def polygon_bncor_checks(count: int = 10, walks: int = 100_000, seed: int = 0):
    """Interior polygon version with a marked run of segments and Monte Carlo epsilon."""
    rng = _rng(seed, 5)
    out = []
    for i in range(count):
        v = random_star_polygon(rng, 0j, 1.0, int(rng.integers(6, 12)))
        dc = float(polyline_distance([0j], v)[0])
        zeta = rng.uniform(0, 0.8) * dc * np.exp(1j * rng.uniform(-np.pi, np.pi))
        n = len(v)
        k0, m = int(rng.integers(n)), int(rng.integers(1, n))
        mask = np.zeros(n, dtype=bool)
        mask[(k0 + np.arange(m)) % n] = True
        s = _sub_seed(seed, 5, i)
        om = hm_monte_carlo(v, mask, zeta, walks, s)
        if om.conservative() <= 0:
            continue
        G = np.concatenate([_segment_samples(v, mask), v[np.roll(mask, 1) & ~mask]])
        out += check_bncor(zeta, G, {"polyline": v}, om)
    return out


def exterior_checks(count: int = 10, walks: int = 100_000, seed: int = 0, n: int = 128):
    """Exterior of a random polygon: distance/diameter bounds, with |Phi^{-1}(zeta)| from
    the exterior Riemann map for the simplified forms."""
    rng = _rng(seed, 6)
    out = []
    for i in range(count):
        v = random_star_polygon(rng, 0j, 1.0, int(rng.integers(5, 10)))
        K = polygon(list(v), n)
        if not K.counterclockwise:
            continue
        nodes = K.values
        zeta = rng.uniform(1.1, 4.0) * np.max(np.abs(nodes)) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        k0, m = int(rng.integers(n)), int(rng.integers(n // 8, n // 2))
        mask = np.zeros(n, dtype=bool)
        mask[(k0 + np.arange(m)) % n] = True
        s = _sub_seed(seed, 6, i)
        om = hm_monte_carlo(nodes, mask, zeta, walks, s)
        if om.conservative() <= 0:
            continue
        z_abs = abs(complex(exterior_map(K).inverse(np.array([zeta]))[0]))
        G = _segment_samples(nodes, mask)
        out += check_unbounded(zeta, G, {"polyline": nodes}, om, z_abs=z_abs)
    return out


# --- corpus maps ------------------------------------------------------------------------

def _random_disk_points(rng, count, r_lo, r_hi):
    r = np.exp(rng.uniform(np.log(r_lo), np.log(r_hi), count))
    return r * np.exp(1j * rng.uniform(-np.pi, np.pi, count))


def corpus_map_checks(entry: CorpusEntry, seed: int = 0, count: int = 40):
    """Conformal sandwiches, extension bounds, modulus bounds and symmetrization margins
    for one corpus curve."""
    rng = _rng(seed, 7, sum(map(ord, entry.name)))
    f = entry.curve()
    out = []
    sym = symmetrize_recentred(f)
    if entry.pipeline == "general":
        ext = extend_plane_symmetric(sym.g)
    else:
        ext = extend_plane_symmetric(f)
    cur = prepared_curve(ext)
    for z in _random_disk_points(rng, count, 1e-3, 0.999):
        out += verify_interior_derivative_bounds(ext.inner_map, cur, z)
    for z in 1.0 / _random_disk_points(rng, count, 1e-3, 0.999):
        out += verify_exterior_derivative_bounds(ext.outer_map, cur, z)
    zeta = _random_disk_points(rng, 4 * count, 1e-3, 0.999)
    for chi in (ext.inner_lift, ext.outer_lift):
        out += ba_ext.check_psi(chi, zeta)
    zo = 1.0 / _random_disk_points(rng, count, 1e-3, 0.999)
    q = ext.modext2(zo)
    out.append(CheckResult("modext2_lower", np.exp(-8 * np.pi), float(np.min(q))))
    out.append(CheckResult("modext2_upper", float(np.max(q)), np.exp(8 * np.pi)))
    checks, _ = symmetrization_checks(sym)
    out += checks + check_cor85(f, sym) + check_inradius(f)
    return out


def winding_checks(count: int = 100, seed: int = 0) -> list[CheckResult]:
    """Singular values (2, 1) of the winding map against central differences."""
    from .extend import finite_difference_jacobian
    from .ba_ext import singular_values
    from .symmetrize import winding_map

    rng = _rng(seed, 8)
    z = _random_disk_points(rng, count, 0.1, 10.0)

    J = finite_difference_jacobian(winding_map, z, h=1e-6 * np.abs(z).min())
    big, small = singular_values(J)
    eb, es = winding_jacobian_norms(z)
    out = []
    for b, s, b0, s0 in zip(big, small, eb, es):
        out.append(CheckResult("winding_sv_max", abs(b - 2.0), 1e-6))
        out.append(CheckResult("winding_sv_min", abs(s - 1.0), 1e-6))
        out.append(CheckResult("winding_sv_formula", abs(b0 - 2.0) + abs(s0 - 1.0), 1e-12))
    return out


# --- report -----------------------------------------------------------------------------

def label_of(name: str) -> str:
    for suf in ("_lower", "_upper", "_inverse"):
        if name.endswith(suf):
            return name[: -len(suf)]
    return name


def violates(c: CheckResult, rel_tol: float = 1e-6) -> bool:
    scale = max(abs(c.lhs), abs(c.rhs), 1e-300)
    return bool(c.margin < -rel_tol * scale)


def summarize(checks, rel_tol: float = 1e-6) -> dict:
    groups: dict[str, list[CheckResult]] = {}
    for c in checks:
        groups.setdefault(c.name, []).append(c)
    table = {}
    for name in sorted(groups):
        cs = groups[name]
        m = np.array([c.margin for c in cs])
        rel = np.array([c.margin / max(abs(c.lhs), abs(c.rhs), 1e-300) for c in cs])
        k = int(np.argmin(rel))
        bad = int(sum(violates(c, rel_tol) for c in cs))
        table[name] = {"label": label_of(name), "count": len(cs), "violations": int(bad),
                       "min_margin": float(m.min()), "mean_margin": float(m.mean()),
                       "min_relative_margin": float(rel[k]), "worst": cs[k].to_json(),
                       "methods": sorted({c.method for c in cs}), "pass": bool(bad == 0)}
    return table


@dataclass
class VerifyConfig:
    seed: int = 0
    walks: int = 100_000
    bn_count: int = 50
    lowerharm_count: int = 200
    mc_count: int = 10
    corpus: tuple = field(default_factory=lambda: DEFAULT_CORPUS)
    map_points: int = 40
    rel_tol: float = 1e-6
    kernel: object = poisson_kernel


def run_verify(cfg: VerifyConfig) -> dict:
    checks = []
    checks += lowerharm_checks(cfg.lowerharm_count, cfg.seed, cfg.kernel)
    checks += disk_bncor_checks(cfg.bn_count, cfg.seed)
    checks += bn_checks(bn_configurations(cfg.bn_count, cfg.seed), cfg.walks, cfg.seed)
    checks += polygon_bncor_checks(cfg.mc_count, cfg.walks, cfg.seed)
    checks += exterior_checks(cfg.mc_count, cfg.walks, cfg.seed)
    for e in cfg.corpus:
        checks += corpus_map_checks(e, cfg.seed, cfg.map_points)
    checks += winding_checks(100, cfg.seed)
    table = summarize(checks, cfg.rel_tol)
    return {"seed": cfg.seed, "walks": cfg.walks, "rel_tol": cfg.rel_tol,
            "corpus": [e.name for e in cfg.corpus],
            "inequalities": table,
            "violations": int(sum(v["violations"] for v in table.values())),
            "pass": all(v["pass"] for v in table.values())}
