"""End-to-end acceptance checks, one test per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see each PASS/FAIL line as it
happens; the same lines are repeated in the terminal summary.
"""
import time

import numpy as np
import pytest

from schoenflies.ba_ext import (CircleHomeoLift, ba_extend, ba_jacobian, check_psi,
                                identity_lift, maxstr_bound, minstr_bound, singular_values)
from schoenflies.conformal import exterior_map
from schoenflies.corpus import DEFAULT_CORPUS, run_entry
from schoenflies.curves import circle, ellipse
from schoenflies.extend import GridSpec, extend_plane_symmetric
from schoenflies.symmetrize import pair_ratio, symmetrize
from schoenflies.verify import (bn_checks, bn_configurations, corpus_map_checks, lowerharm_checks,
                                violates, winding_checks)

TWO_PI = 2 * np.pi
SEED = 20240611


@pytest.fixture(scope="module")
def corpus_runs():
    t0 = time.perf_counter()
    runs = [run_entry(e) for e in DEFAULT_CORPUS]
    return runs, time.perf_counter() - t0


@pytest.fixture(scope="module")
def corpus_checks():
    return {e.name: corpus_map_checks(e, SEED) for e in DEFAULT_CORPUS}


def worst(checks, rel_tol=None):
    """Smallest margin (relative when rel_tol is given) and the number of violations."""
    if not checks:
        return np.inf, 0
    if rel_tol is None:
        return min(c.margin for c in checks), sum(c.margin < 0 for c in checks)
    rel = [c.margin / max(abs(c.lhs), abs(c.rhs), 1e-300) for c in checks]
    return min(rel), sum(violates(c, rel_tol) for c in checks)


def test_criterion_01_similarities_are_reproduced(record):
    grid = GridSpec.default()
    z = grid.points()
    cases = [("identity", 1.0)] + [(f"rotation {a}", np.exp(1j * a)) for a in (0.7, np.pi / 3, 2.0)] \
        + [(f"circle R={R}", R) for R in (0.5, 2.5)]
    errs, slow = {}, []
    for name, c in cases:
        t0 = time.perf_counter()
        F = extend_plane_symmetric(circle(0, 1, 64).scaled(c))
        errs[name] = float(np.max(np.abs(F(z) - c * z)))
        if time.perf_counter() - t0 >= 10:
            slow.append(name)
    bad = max(errs.values())
    record(1, bad <= 1e-6 and not slow,
           f"sup |F - exact| = {bad:.2e} over {z.size} grid points, {len(cases)} maps, slow={slow}")


def test_criterion_02_shifted_circle_anchor(record):
    sym = symmetrize(circle(0.9, 1, 128), 0.0)
    gv = np.abs(sym.g(np.array([np.pi / 2, 3 * np.pi / 2])))
    ratio = pair_ratio(sym.g, np.pi / 2, 3 * np.pi / 2)
    err = max(np.max(np.abs(gv - 0.1)), abs(ratio - 0.1))
    record(2, err <= 1e-9, f"|g(i)|, |g(-i)| = {gv[0]:.12f}, {gv[1]:.12f}; pair ratio {ratio:.12f}")


def test_criterion_03_lower_bounds_on_disk_arcs(record):
    t0 = time.perf_counter()
    cs = lowerharm_checks(200, SEED, exterior=False)
    dt = time.perf_counter() - t0
    m, bad = worst(cs)
    record(3, bad == 0 and dt < 30,
           f"{len(cs)} exact values, min margin {m:.3e}, violations {bad}, {dt:.1f} s")


def test_criterion_04_projection_bounds_by_monte_carlo(record):
    t0 = time.perf_counter()
    cs = bn_checks(bn_configurations(50, SEED), walks=100_000, seed=SEED)
    dt = time.perf_counter() - t0
    m, bad = worst(cs)
    record(4, bad == 0 and dt < 300,
           f"{len(cs)} checks at 1e5 walks, min 3-sigma margin {m:.3e}, violations {bad}, {dt:.0f} s")


def random_lift(rng, n):
    gaps = rng.uniform(0.2, 1.0, n)
    t = TWO_PI * np.concatenate([[0], np.cumsum(gaps)[:-1]]) / gaps.sum()
    jumps = rng.uniform(0.05, 1.0, n)
    c = TWO_PI * np.concatenate([[0], np.cumsum(jumps)[:-1]]) / jumps.sum() + rng.uniform(-3, 3)
    return CircleHomeoLift(t, c, False, TWO_PI)


def near_breakpoint(chi, z, tol):
    """Points whose averaging windows end within tol of a breakpoint of chi."""
    ends = z.real[:, None] + np.array([-1.0, 0.0, 1.0]) * z.imag[:, None]
    d = np.mod(ends[..., None] - chi.t + np.pi, TWO_PI) - np.pi
    return np.min(np.abs(d), axis=(1, 2)) < tol


def test_criterion_05_half_plane_extension_identities(record):
    rng = np.random.default_rng(SEED)
    z0 = rng.uniform(-20, 20, 1000) + 1j * np.exp(rng.uniform(np.log(1e-3), np.log(50), 1000))
    id_err = float(np.max(np.abs(ba_extend(identity_lift(64), z0) - z0)))

    im_dev, str_rel, fd_rel, fd_count = 0.0, -np.inf, 0.0, 0
    h = 1e-6
    for _ in range(100):
        chi = random_lift(rng, int(rng.integers(8, 48)))
        z = rng.uniform(-20, 20, 100) + 1j * np.exp(rng.uniform(np.log(1e-3), np.log(50), 100))
        im_dev = max(im_dev, float(np.max(np.abs(ba_extend(chi, z).imag - z.imag))))
        J = ba_jacobian(chi, z)
        big, small = singular_values(J)
        str_rel = max(str_rel, float(np.max(big / maxstr_bound(chi, z) - 1)),
                      float(np.max((1 / small) / minstr_bound(chi, z) - 1)))
        # central differences are only valid where chi is linear across both windows
        ok = ~near_breakpoint(chi, z, 1e2 * h * np.maximum(1, np.abs(z.real)))
        ok &= z.imag > 1e2 * h
        zk = z[ok][:10]
        dx = (ba_extend(chi, zk + h) - ba_extend(chi, zk - h)) / (2 * h)
        dy = (ba_extend(chi, zk + 1j * h) - ba_extend(chi, zk - 1j * h)) / (2 * h)
        fd = np.stack([np.stack([dx.real, dy.real], -1), np.stack([dx.imag, dy.imag], -1)], -2)
        Jk = J[ok][:10]
        rel = np.linalg.norm(Jk - fd, axis=(1, 2)) / np.linalg.norm(Jk, axis=(1, 2))
        fd_rel = max(fd_rel, float(rel.max()))
        fd_count += zk.size
    ok = id_err <= 1e-12 and im_dev <= 4 * np.pi and fd_rel <= 1e-6 and str_rel <= 1e-9
    record(5, ok, f"identity err {id_err:.1e}; max |Im - y| {im_dev:.3f} <= 4pi on 1e4 samples; "
                  f"FD rel err {fd_rel:.1e} at {fd_count} points; stretch excess {str_rel:.1e}")


def test_criterion_06_modulus_bounds_on_corpus_grids(record, corpus_runs):
    runs, _ = corpus_runs
    zeta = GridSpec.default(outer=False).points()
    zeta = zeta[np.abs(zeta) < 1]
    checks, margins = [], []
    for run in runs:
        ext = run.symmetric_part
        for chi in (ext.inner_lift, ext.outer_lift):
            checks += [c for c in check_psi(chi, zeta) if c.name.startswith("modext")]
        for tbm in (run.report["theorem_bound_margins"],
                    run.report.get("symmetric_factor", {}).get("theorem_bound_margins", {})):
            margins += [v for k, v in tbm.items() if k.startswith("modext2")]
    m, bad = worst(checks)
    bad += sum(v < 0 for v in margins)
    record(6, bad == 0 and len(margins) >= 2 * len(runs),
           f"{zeta.size} grid points x {len(runs)} curves, min |Psi| margin {m:.3e}, "
           f"min area-factor margin {min(margins):.3e}, violations {bad}")


def test_criterion_07_conformal_sandwiches(record, corpus_checks):
    names = ("Koebe", "Koebedist1", "Sigmadist", "capdiam")
    cs = [c for v in corpus_checks.values() for c in v if c.name.split("_")[0] in names]
    m, bad = worst(cs, rel_tol=1e-6)
    caps = [(R, exterior_map(circle(0, R, 64)).capacity) for R in (0.5, 1.0, 2.5)]
    cap_err = max(abs(c - R) / R for R, c in caps)
    thin = exterior_map(ellipse(2, 0.02, 256)).capacity
    ok = bad == 0 and cap_err <= 1e-12 and abs(thin - 1) <= 0.02
    record(7, ok, f"{len(cs)} sandwich checks, min rel margin {m:.3e}, violations {bad}; "
                  f"circle capacity rel err {cap_err:.1e}; thin ellipse capacity {thin:.5f}")


def test_criterion_08_theorem_bound_margins(record, corpus_runs):
    runs, _ = corpus_runs
    keys = ("DF", "DF_inv", "interior_DF", "interior_DF_inv")
    seen, low = set(), np.inf
    bad = 0
    for run in runs:
        parts = [(run.report["kind"], run.report["theorem_bound_margins"])]
        if "symmetric_factor" in run.report:
            parts.append(("global", run.report["symmetric_factor"]["theorem_bound_margins"]))
        for kind, tbm in parts:
            for k in keys:
                if k in tbm:
                    seen.add(f"{kind}:{k}")
                    low = min(low, tbm[k])
                    bad += tbm[k] <= 0
    record(8, bad == 0 and len(seen) == 6,
           f"bounds checked {sorted(seen)}, min margin {low:.3e}, violations {bad}")


def test_criterion_09_boundary_round_trip(record, corpus_runs):
    runs, total = corpus_runs
    rel = {r.entry.name: r.report["boundary_agreement_rel"] for r in runs}
    name = max(rel, key=rel.get)
    record(9, max(rel.values()) <= 1e-3 and total < 900,
           f"worst boundary agreement {rel[name]:.2e}*diam ({name}), corpus time {total:.0f} s")


def test_criterion_10_symmetrization_margins(record, corpus_checks):
    cs = [c for v in corpus_checks.values() for c in v
          if c.name.split("_")[0] in ("prop84", "cor85", "inradius")]
    m, bad = worst(cs)
    wc = winding_checks(100, SEED)
    wm, wbad = worst(wc)
    record(10, bad == 0 and wbad == 0 and len(cs) >= 6 * len(corpus_checks),
           f"{len(cs)} symmetrization checks, min margin {m:.3e}; winding singular values "
           f"at 100 points, min margin {wm:.2e}")
