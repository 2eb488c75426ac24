"""Harmonic measure: exact disk formulas, projection-theorem bounds, Monte Carlo.

Exact values are Poisson integrals over arcs of the unit circle.  Arbitrary
polygonal domains (interior or exterior) are handled by walk-on-spheres.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .curves import CurveError, find_self_intersection, polyline_distance, set_diam, _winding_sum

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Arc:
    t_lo: float
    t_hi: float

    def __post_init__(self):
        if not self.t_lo < self.t_hi <= self.t_lo + TWO_PI:
            raise ValueError(f"invalid arc [{self.t_lo}, {self.t_hi}]")

    @property
    def length(self) -> float:
        return self.t_hi - self.t_lo

    def reflected(self) -> "Arc":
        """Image under complex conjugation, t -> -t."""
        return Arc(-self.t_hi, -self.t_lo)

    def samples(self, m: int = 256) -> np.ndarray:
        return np.exp(1j * np.linspace(self.t_lo, self.t_hi, m))


@dataclass(frozen=True)
class HarmonicMeasureResult:
    value: float
    method: str
    std_error: float = 0.0
    walks: int = 0
    seed: int | None = None
    stuck: int = 0

    def conservative(self, k: float = 3.0) -> float:
        """Lower confidence value, used as epsilon in one-sided inequality checks."""
        return self.value - k * self.std_error


def gamma_arcs(z: complex) -> tuple[Arc, Arc, Arc, Arc]:
    """The four arcs around arg z with scale log(1/|z|) (or log|z| outside the disk)."""
    r = abs(z)
    if r == 0 or r == 1:
        raise ValueError("gamma arcs need 0 < |z| != 1")
    delta = abs(np.log(r))
    th = float(np.angle(z))
    return (Arc(th - 2 * delta, th - delta), Arc(th - delta, th - delta / 2),
            Arc(th + delta / 2, th + delta), Arc(th + delta, th + 2 * delta))


def poisson_kernel(z, zeta):
    z = np.asarray(z, dtype=complex)
    return (1.0 - np.abs(z) ** 2) / (TWO_PI * np.abs(zeta - z) ** 2)


def hm_disk_exact(z: complex, arc: Arc, kernel=poisson_kernel) -> HarmonicMeasureResult:
    if abs(z) >= 1:
        raise ValueError("hm_disk_exact needs |z| < 1")
    f = lambda t: kernel(z, np.exp(1j * t))
    # split at the kernel peak so quad sees the concentrated mass
    pts = None
    th = np.angle(z)
    th = th + TWO_PI * np.ceil((arc.t_lo - th) / TWO_PI)
    if arc.t_lo < th < arc.t_hi:
        pts = [th]
    val, _ = integrate.quad(f, arc.t_lo, arc.t_hi, epsabs=1e-13, epsrel=1e-12, limit=500,
                            points=pts)
    return HarmonicMeasureResult(float(min(max(val, 0.0), 1.0)), "poisson-exact")


def hm_disk_closed_form(z: complex, arc: Arc) -> float:
    """Angle formula: omega = (swept angle of zeta - z)/pi - length/(2 pi)."""
    a, b = np.exp(1j * arc.t_lo), np.exp(1j * arc.t_hi)
    if arc.length >= TWO_PI:
        return 1.0
    sweep = np.mod(np.angle((b - z) / (a - z)), TWO_PI)
    return float(sweep / np.pi - arc.length / TWO_PI)


def hm_exterior_exact(z: complex, arc: Arc, kernel=poisson_kernel) -> HarmonicMeasureResult:
    """Exterior of the disk; z -> 1/z maps arcs to conjugate arcs."""
    if abs(z) <= 1:
        raise ValueError("hm_exterior_exact needs |z| > 1")
    return hm_disk_exact(1.0 / z, arc.reflected(), kernel=kernel)


# --- Beurling-Nevanlinna bounds -------------------------------------------------

def bn_lower(zeta_abs: float, rho: float) -> float:
    if not 0 <= zeta_abs < rho:
        raise ValueError("bn_lower needs 0 <= |zeta| < rho")
    return 2 / np.pi * np.arcsin((rho - zeta_abs) / (rho + zeta_abs))


def bn_upper(zeta_abs: float, rho: float) -> float:
    if not zeta_abs > rho > 0:
        raise ValueError("bn_upper needs |zeta| > rho > 0")
    return 2 / np.pi * np.arccos((zeta_abs - rho) / (zeta_abs + rho))


@dataclass(frozen=True)
class CheckResult:
    """One evaluated inequality lhs <= rhs; margin = rhs - lhs."""
    name: str
    lhs: float
    rhs: float
    method: str = "exact"
    walks: int = 0
    std_error: float = 0.0
    seed: int | None = None

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def holds(self, tol: float = 0.0) -> bool:
        return self.margin >= -tol

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin,
                "method": self.method, "walks": self.walks, "std_error": self.std_error,
                "seed": self.seed}


def _points(s):
    if isinstance(s, dict) and "polyline" in s:
        return np.asarray(s["polyline"], dtype=complex)
    return s.points if hasattr(s, "points") else np.atleast_1d(np.asarray(s, dtype=complex))


def _dist(zeta, pts):
    return float(np.min(np.abs(np.asarray(pts) - zeta)))


def _diam(pts):
    return set_diam(pts)


def _eps(omega) -> tuple[float, str, int, float, int | None]:
    if isinstance(omega, HarmonicMeasureResult):
        eps = omega.value if omega.method == "poisson-exact" else omega.conservative()
        return eps, omega.method, omega.walks, omega.std_error, omega.seed
    return float(omega), "exact", 0, 0.0, None


def check_bncor(zeta: complex, gamma, boundary, omega) -> list[CheckResult]:
    """Both inequalities derived from the projection theorem for a bounded domain.

    ``boundary`` is either a point set of the boundary or a polyline (vertex list);
    distances to a polyline are measured to its segments.
    """
    eps, method, walks, se, seed = _eps(omega)
    if eps <= 0:
        raise ValueError("harmonic measure lower bound must be positive")
    G = _points(gamma)
    d_bdry = _boundary_distance(zeta, boundary)
    dG = _dist(zeta, G)
    s2 = np.sin(np.pi * eps / 4) ** 2
    t2 = np.tan(np.pi * eps / 4) ** 2
    kw = dict(method=method, walks=walks, std_error=se, seed=seed)
    return [CheckResult("BNcor1", dG, d_bdry / s2, **kw),
            CheckResult("BNcor2", t2 * dG, _diam(G), **kw)]


def check_unbounded(zeta: complex, gamma, K, omega, z_abs: float | None = None) -> list[CheckResult]:
    """Exterior-domain versions: distGamma, diamGamma and (given |Phi^{-1}(zeta)|) distdiam,
    diamGammaSimple."""
    eps, method, walks, se, seed = _eps(omega)
    if eps <= 0:
        raise ValueError("harmonic measure lower bound must be positive")
    G = _points(gamma)
    Kp = _points(K)
    dK = _boundary_distance(zeta, K)
    dG = _dist(zeta, G)
    diamK, diamG = _diam(Kp), _diam(G)
    s2 = np.sin(np.pi * eps / 4) ** 2
    t2 = np.tan(np.pi * eps / 4) ** 2
    kw = dict(method=method, walks=walks, std_error=se, seed=seed)
    fac = (diamK - diamG) ** 2 / (diamK * (diamK + dG))
    out = [CheckResult("distGamma", dG, 4 * dK / s2, **kw),
           CheckResult("diamGamma", 0.25 * t2 * fac * dG, diamG, **kw)]
    if z_abs is not None:
        out.append(CheckResult("distdiam", dG, z_abs * diamK, **kw))
        out.append(CheckResult("diamGammaSimple", t2 * dG / (32 * z_abs), diamG, **kw))
    return out


def _boundary_distance(zeta, boundary) -> float:
    if isinstance(boundary, dict) and "polyline" in boundary:
        return float(polyline_distance([zeta], boundary["polyline"])[0])
    return _dist(zeta, _points(boundary))


# --- walk on spheres ----------------------------------------------------------------

CHUNK = 4096


def _nearest_on_polyline(p, a, b):
    d = b - a
    lam = np.clip(((p[:, None] - a) * np.conj(d)).real / np.abs(d) ** 2, 0.0, 1.0)
    foot = a + lam * d
    dist = np.abs(p[:, None] - foot)
    k = np.argmin(dist, axis=1)
    r = np.arange(len(p))
    return dist[r, k], k, foot[r, k]


def hm_monte_carlo(vertices, target, z: complex, walks: int = 100_000, seed: int = 0,
                   absorb: float = 1e-4, kill: float = 1e3, max_steps: int = 100_000,
                   max_stuck_frac: float = 1e-3) -> HarmonicMeasureResult:
    """Walk-on-spheres estimate of the harmonic measure of a boundary subset.

    ``vertices`` is a closed simple polyline.  ``target`` is a boolean mask over
    segments (segment k joins vertex k to k+1) or a callable taking exit points and
    returning a boolean array.  ``z`` may be inside or outside the polyline; outside
    walks that leave the circle of radius ``kill * diam`` are returned to it with
    the exact hitting distribution of that circle.

    Walks are processed in fixed chunks seeded by ``(seed, chunk index)``, so the
    result does not depend on how chunks are scheduled.
    """
    a = np.asarray(vertices, dtype=complex)
    b = np.roll(a, -1)
    if find_self_intersection(a) is not None:
        raise CurveError("boundary polyline is not simple")
    if walks < 1000:
        raise ValueError("need at least 1000 walks")
    diam = set_diam(a)
    h = absorb * diam
    if float(polyline_distance([z], a)[0]) <= h:
        raise ValueError("start point lies within the absorption layer")
    exterior = abs(_winding_sum(a, z)) < 0.5
    center = complex(np.mean(a))
    R = kill * diam
    mask = None if callable(target) else np.asarray(target, dtype=bool)

    hits = 0
    stuck = 0
    n_chunks = -(-walks // CHUNK)
    for c in range(n_chunks):
        m = min(CHUNK, walks - c * CHUNK)
        rng = np.random.default_rng(np.random.SeedSequence([seed, c]))
        pos = np.full(m, complex(z))
        active = np.ones(m, dtype=bool)
        score = np.zeros(m, dtype=bool)
        for _ in range(max_steps):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            p = pos[idx]
            if exterior:
                far = np.abs(p - center) > R
                if np.any(far):
                    q = (p[far] - center)
                    a_in = R / np.conj(q)  # reflected start point, in units of R
                    u = np.exp(1j * rng.uniform(0, TWO_PI, far.sum()))
                    p[far] = center + R * (u + a_in) / (1 + np.conj(a_in) * u)
            d, k, foot = _nearest_on_polyline(p, a, b)
            done = d <= h
            if np.any(done):
                di = idx[done]
                if mask is not None:
                    score[di] = mask[k[done]]
                else:
                    score[di] = np.asarray(target(foot[done]), dtype=bool)
                active[di] = False
            go = ~done
            p = p[go] + d[go] * np.exp(1j * rng.uniform(0, TWO_PI, go.sum()))
            pos[idx[go]] = p
        stuck += int(active.sum())
        hits += int(score.sum())
    done_walks = walks - stuck
    if stuck > max_stuck_frac * walks:
        raise RuntimeError(f"{stuck} of {walks} walks failed to absorb within {max_steps} steps")
    v = hits / done_walks
    se = np.sqrt(max(v * (1 - v), 1.0 / done_walks) / done_walks)
    return HarmonicMeasureResult(float(v), "monte-carlo", float(se), int(done_walks), seed, stuck)
