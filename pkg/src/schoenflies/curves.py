"""Sampled circle embeddings, planar point sets and metric utilities.

A circle embedding is stored as nodes ``(t_k, f(e^{i t_k}))`` and is
interpolated linearly in the parameter, so the image is a closed polyline.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi
ALL_PAIRS_LIMIT = 2_000_000


class CurveError(ValueError):
    """Invalid curve data (self-intersection, bad ordering, ...)."""


@dataclass(frozen=True, eq=False)
class CircleEmbedding:
    t: np.ndarray
    values: np.ndarray
    symmetric: bool = False
    name: str = "curve"
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)
        t.setflags(write=False)
        v.setflags(write=False)
        if t.ndim != 1 or t.shape != v.shape:
            raise CurveError("t and values must be 1-d arrays of equal length")
        if len(t) < 3:
            raise CurveError("need at least 3 nodes")
        if t[0] < 0 or t[-1] >= TWO_PI or np.any(np.diff(t) <= 0):
            raise CurveError("node parameters must be strictly increasing in [0, 2pi)")
        if not self.check:
            return
        if min_pairwise_distance(v) <= 0:
            raise CurveError("node values are not pairwise distinct")
        bad = find_self_intersection(v)
        if bad is not None:
            raise CurveError(f"polyline self-intersects: segments {bad[0]} and {bad[1]}")
        if self.symmetric:
            _check_symmetry(t, v)

    @property
    def n(self) -> int:
        return len(self.t)

    @property
    def diam(self) -> float:
        return set_diam(self.values)

    @property
    def domain_points(self) -> np.ndarray:
        return np.exp(1j * self.t)

    def __call__(self, s) -> np.ndarray:
        """Evaluate the piecewise-linear map at parameters ``s`` (any real)."""
        s = np.mod(np.asarray(s, dtype=float), TWO_PI)
        tt = np.append(self.t, self.t[0] + TWO_PI)
        vv = np.append(self.values, self.values[0])
        s = np.where(s < self.t[0], s + TWO_PI, s)
        k = np.clip(np.searchsorted(tt, s, side="right") - 1, 0, len(self.t) - 1)
        lam = (s - tt[k]) / (tt[k + 1] - tt[k])
        return vv[k] + lam * (vv[k + 1] - vv[k])

    def refined(self, factor: int) -> "CircleEmbedding":
        """Same polyline map with ``factor`` equal parameter sub-steps per segment."""
        if factor <= 1:
            return self
        tt = np.append(self.t, self.t[0] + TWO_PI)
        steps = np.arange(factor) / factor
        s = (tt[:-1, None] + steps[None, :] * np.diff(tt)[:, None]).ravel()
        s = np.sort(np.mod(s, TWO_PI))
        z = self(s)
        if self.symmetric:
            h = len(s) // 2
            s[h:] = s[:h] + np.pi
            z[h:] = -z[:h]
        return CircleEmbedding(s, z, symmetric=self.symmetric, name=self.name, check=False)

    def translated(self, w: complex) -> "CircleEmbedding":
        return CircleEmbedding(self.t, self.values - w, symmetric=False, name=self.name)

    def scaled(self, c: complex) -> "CircleEmbedding":
        return CircleEmbedding(self.t, c * self.values, symmetric=self.symmetric, name=self.name)

    def signed_area(self) -> float:
        v = self.values
        w = np.roll(v, -1)
        return 0.5 * float(np.sum(v.real * w.imag - w.real * v.imag))

    @property
    def counterclockwise(self) -> bool:
        return self.signed_area() > 0

    def to_json(self) -> dict:
        return {
            "nodes": [[float(t), float(v.real), float(v.imag)] for t, v in zip(self.t, self.values)],
            "symmetric": bool(self.symmetric),
            "name": self.name,
        }


def _check_symmetry(t, v):
    n = len(t)
    if n % 2:
        raise CurveError("symmetric curve needs an even node count")
    h = n // 2
    if not (np.allclose(t[h:], t[:h] + np.pi, rtol=0, atol=1e-12)
            and np.array_equal(v[h:], -v[:h])):
        raise CurveError("symmetry flag set but f(-z) = -f(z) fails at nodes")


@dataclass(frozen=True)
class PlanarSet:
    points: np.ndarray

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.points, dtype=complex))
        if p.size == 0:
            raise ValueError("planar set must be non-empty")
        object.__setattr__(self, "points", p)


def _pts(a) -> np.ndarray:
    if isinstance(a, PlanarSet):
        return a.points
    p = np.atleast_1d(np.asarray(a, dtype=complex))
    if p.size == 0:
        raise ValueError("planar set must be non-empty")
    return p


def set_dist(a, b, block: int = 2048) -> float:
    a, b = _pts(a), _pts(b)
    best = np.inf
    for i in range(0, len(a), block):
        best = min(best, float(np.min(np.abs(a[i:i + block, None] - b[None, :]))))
    return best


def set_diam(a, block: int = 2048) -> float:
    a = _pts(a)
    best = 0.0
    for i in range(0, len(a), block):
        best = max(best, float(np.max(np.abs(a[i:i + block, None] - a[None, :]))))
    return best


def min_pairwise_distance(v: np.ndarray, block: int = 1024) -> float:
    v = np.asarray(v, dtype=complex)
    best = np.inf
    for i in range(0, len(v), block):
        d = np.abs(v[i:i + block, None] - v[None, :])
        r = np.arange(d.shape[0])
        d[r, r + i] = np.inf
        best = min(best, float(d.min()))
    return best


# --- polyline geometry -------------------------------------------------------

def _cross(a, b):
    return a.real * b.imag - a.imag * b.real


def find_self_intersection(v: np.ndarray, tol: float = 1e-12):
    """Return the first pair of non-adjacent intersecting segments, or None."""
    v = np.asarray(v, dtype=complex)
    n = len(v)
    p, q = v, np.roll(v, -1)
    scale = max(set_diam(v) if n <= 4096 else float(np.ptp(v.real) + np.ptp(v.imag)), 1e-300)
    eps = tol * scale * scale
    lo = np.minimum(p.real, q.real), np.minimum(p.imag, q.imag)
    hi = np.maximum(p.real, q.real), np.maximum(p.imag, q.imag)
    for i in range(n - 2):
        j = np.arange(i + 2, n if i > 0 else n - 1)
        if j.size == 0:
            continue
        box = ((lo[0][j] <= hi[0][i] + tol * scale) & (hi[0][j] >= lo[0][i] - tol * scale)
               & (lo[1][j] <= hi[1][i] + tol * scale) & (hi[1][j] >= lo[1][i] - tol * scale))
        j = j[box]
        if j.size == 0:
            continue
        r = q[i] - p[i]
        d1 = _cross(r, p[j] - p[i])
        d2 = _cross(r, q[j] - p[i])
        s = q[j] - p[j]
        d3 = _cross(s, p[i] - p[j])
        d4 = _cross(s, q[i] - p[j])
        hit = (d1 * d2 <= eps) & (d3 * d4 <= eps)
        if np.any(hit):
            return int(i), int(j[np.argmax(hit)])
    return None


def segment_distance(points, a, b) -> np.ndarray:
    """Distance from each point to each segment [a_k, b_k]; shape (len(points), len(a))."""
    z = np.asarray(points, dtype=complex)[..., None]
    d = b - a
    dd = np.where(np.abs(d) > 0, np.abs(d) ** 2, 1.0)
    lam = np.clip(((z - a) * np.conj(d)).real / dd, 0.0, 1.0)
    return np.abs(z - (a + lam * d))


def polyline_distance(points, vertices, block: int = 4096, return_index: bool = False):
    """Distance from points to the closed polyline through ``vertices``."""
    pts = np.asarray(points, dtype=complex)
    shape = pts.shape
    pts = pts.ravel()
    a = np.asarray(vertices, dtype=complex)
    b = np.roll(a, -1)
    out = np.empty(pts.shape, dtype=float)
    idx = np.empty(pts.shape, dtype=int)
    step = max(1, block * 64 // max(len(a), 1))
    for i in range(0, len(pts), step):
        d = segment_distance(pts[i:i + step], a, b)
        idx[i:i + step] = np.argmin(d, axis=1)
        out[i:i + step] = d[np.arange(len(d)), idx[i:i + step]]
    if return_index:
        return out.reshape(shape), idx.reshape(shape)
    return out.reshape(shape)


def project_to_polyline(w, vertices):
    """Nearest point on the closed polyline: (segment index, fraction, distance)."""
    a = np.asarray(vertices, dtype=complex)
    b = np.roll(a, -1)
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    d, k = polyline_distance(w, a, return_index=True)
    seg = b[k] - a[k]
    lam = np.clip(((w - a[k]) * np.conj(seg)).real / np.abs(seg) ** 2, 0.0, 1.0)
    return k, lam, d


def winding_number(curve, p, tol: float = 1e-12) -> int:
    """Winding number of the closed polyline about ``p`` (summed signed angles)."""
    v = curve.values if isinstance(curve, CircleEmbedding) else np.asarray(curve, dtype=complex)
    scale = set_diam(v) if len(v) <= 4096 else float(np.ptp(v.real) + np.ptp(v.imag))
    if float(polyline_distance([p], v)[0]) <= tol * scale:
        raise CurveError("point on curve")
    return int(round(_winding_sum(v, p)))


def _winding_sum(v, p):
    a = np.asarray(v, dtype=complex) - np.asarray(p, dtype=complex)[..., None]
    b = np.roll(a, -1, axis=-1)
    return np.sum(np.angle(b / a), axis=-1) / TWO_PI


def inside(curve, points) -> np.ndarray:
    """Boolean mask: points with nonzero winding number (points on the curve excluded)."""
    v = curve.values if isinstance(curve, CircleEmbedding) else np.asarray(curve, dtype=complex)
    pts = np.asarray(points, dtype=complex)
    flat = pts.ravel()
    out = np.empty(flat.shape, dtype=bool)
    step = max(1, 2_000_000 // len(v))
    for i in range(0, len(flat), step):
        out[i:i + step] = np.abs(_winding_sum(v, flat[i:i + step])) > 0.5
    return out.reshape(pts.shape)


# --- bi-Lipschitz constants ----------------------------------------------------

@dataclass(frozen=True)
class BiLipschitzReport:
    upper_L: float
    lower_l: float
    argmax_pair: tuple
    argmin_pair: tuple
    num_pairs_tested: int
    strategy: str = "all-pairs"

    def to_json(self) -> dict:
        c = lambda z: [float(np.real(z)), float(np.imag(z))]
        return {
            "upper_L": self.upper_L,
            "lower_l": self.lower_l,
            "argmax_pair": [c(z) for z in self.argmax_pair],
            "argmin_pair": [c(z) for z in self.argmin_pair],
            "num_pairs_tested": self.num_pairs_tested,
            "strategy": self.strategy,
        }


def bilipschitz_constants(domain, image, strategy: str = "auto", budget: int = ALL_PAIRS_LIMIT,
                          seed: int = 0) -> BiLipschitzReport:
    """Max/min of |image difference| / |domain difference| over sample pairs.

    The result brackets the true constants from the inside: ``upper_L`` is a lower
    estimate of the Lipschitz constant and ``lower_l`` an upper estimate of the
    co-Lipschitz constant.  ``strategy`` is ``"all-pairs"``, ``"random"`` or
    ``"auto"`` (all pairs up to ``budget`` pairs, random pairs beyond).
    """
    x = np.asarray(domain, dtype=complex).ravel()
    y = np.asarray(image, dtype=complex).ravel()
    if len(x) < 2 or x.shape != y.shape:
        raise ValueError("need at least 2 samples with matching domain/image")
    m = len(x)
    npairs = m * (m - 1) // 2
    if strategy == "auto":
        strategy = "all-pairs" if npairs <= budget else "random"
    best = [-np.inf, None, np.inf, None]

    def scan(i, j):
        dx = np.abs(x[i] - x[j])
        if np.any(dx == 0):
            raise ValueError("duplicate domain points")
        r = np.abs(y[i] - y[j]) / dx
        k = int(np.argmax(r))
        if r[k] > best[0]:
            best[0], best[1] = float(r[k]), (i[k], j[k])
        k = int(np.argmin(r))
        if r[k] < best[2]:
            best[2], best[3] = float(r[k]), (i[k], j[k])

    if strategy == "all-pairs":
        tested = npairs
        for i0 in range(0, m - 1):
            j = np.arange(i0 + 1, m)
            scan(np.full(j.shape, i0), j)
    elif strategy == "random":
        rng = np.random.default_rng(seed)
        i = rng.integers(0, m, size=budget)
        j = rng.integers(0, m - 1, size=budget)
        j = np.where(j >= i, j + 1, j)
        tested = budget
        scan(i, j)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    (a, b), (c, d) = best[1], best[3]
    return BiLipschitzReport(best[0], best[2], (x[a], x[b], y[a], y[b]), (x[c], x[d], y[c], y[d]),
                             tested, strategy)


def embedding_constants(curve: CircleEmbedding, refine: int = 4, **kw) -> BiLipschitzReport:
    """Empirical constants of the polyline map, sampled ``refine`` times per segment."""
    c = curve.refined(refine)
    return bilipschitz_constants(c.domain_points, c.values, **kw)


# --- incenter ---------------------------------------------------------------------

@dataclass(frozen=True)
class IncenterReport:
    center: complex
    radius: float


_DIRS = np.exp(2j * np.pi * np.arange(64) / 64)


def incenter(curve, grid_resolution: int = 128, levels: int = 3, zoom: int = 4) -> IncenterReport:
    """Largest inscribed disk: grid search, zoomed refinement, then compass search."""
    v = curve.values if isinstance(curve, CircleEmbedding) else np.asarray(curve, dtype=complex)

    def dist(p):
        return polyline_distance(p, v)

    lo = complex(v.real.min(), v.imag.min())
    hi = complex(v.real.max(), v.imag.max())
    best, best_d = None, -np.inf
    center, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    for level in range(levels + 1):
        xs = np.linspace(center.real - half.real, center.real + half.real, grid_resolution)
        ys = np.linspace(center.imag - half.imag, center.imag + half.imag, grid_resolution)
        g = (xs[None, :] + 1j * ys[:, None]).ravel()
        g = g[inside(v, g)]
        if g.size == 0:
            if best is None:
                raise CurveError("no interior grid points found")
            break
        d = dist(g)
        m = d.max()
        cand = g[d >= m - 1e-15 * max(1.0, m)]
        cand = cand[np.lexsort((cand.imag, cand.real))]
        if m > best_d:
            best, best_d = cand[0], m
        center = best
        step = complex(xs[1] - xs[0], ys[1] - ys[0])
        half = complex(step.real * grid_resolution / (2 * zoom), step.imag * grid_resolution / (2 * zoom))

    h = max(abs(step.real), abs(step.imag))
    tol = 1e-13 * max(set_diam(v[:: max(1, len(v) // 512)]), 1e-300)
    while h > tol:
        trial = best + h * _DIRS
        d = dist(trial)
        k = int(np.argmax(d))
        if d[k] > best_d and inside(v, trial[k:k + 1])[0]:
            best, best_d = trial[k], float(d[k])
        else:
            h *= 0.5
    return IncenterReport(complex(best), float(best_d))


# --- named families ----------------------------------------------------------------

def _params(n):
    if n < 16:
        raise CurveError("sample count n must be >= 16")
    return TWO_PI * np.arange(n) / n


def circle(c: complex = 0.0, R: float = 1.0, n: int = 64) -> CircleEmbedding:
    t = _params(n)
    z = R * np.exp(1j * t)
    if n % 2 == 0:
        z[n // 2:] = -z[: n // 2]
    return CircleEmbedding(t, c + z, symmetric=(c == 0 and n % 2 == 0), name=f"circle({c},{R})")


def ellipse(a: float = 2.0, b: float = 1.0, n: int = 256) -> CircleEmbedding:
    t = _params(n)
    z = a * np.cos(t) + 1j * b * np.sin(t)
    if n % 2 == 0:
        z[n // 2:] = -z[: n // 2]
    return CircleEmbedding(t, z, symmetric=n % 2 == 0, name=f"ellipse({a},{b})")


def _arclength_param(vertices: np.ndarray, n: int, t_start: float = 0.0, t_span: float = TWO_PI,
                     closed: bool = True):
    vv = np.append(vertices, vertices[0]) if closed else vertices
    seg = np.abs(np.diff(vv))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    s = np.arange(n) / n * cum[-1]
    k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
    lam = (s - cum[k]) / seg[k]
    return t_start + t_span * np.arange(n) / n, vv[k] + lam * (vv[k + 1] - vv[k])


def polygon(vertices, n: int = 256) -> CircleEmbedding:
    """Polygon traversed at constant speed (arclength-proportional parameter)."""
    vtx = np.asarray(vertices, dtype=complex)
    _params(n)
    t, z = _arclength_param(vtx, n)
    sym = False
    if n % 2 == 0 and np.allclose(z[n // 2:], -z[: n // 2], atol=1e-12 * set_diam(vtx)):
        z[n // 2:] = -z[: n // 2]
        sym = True
    return CircleEmbedding(t, z, symmetric=sym, name="polygon")


def bowtie(eps: float = 0.1, n: int = 256) -> CircleEmbedding:
    """Two triangular lobes joined at a waist of width ``eps``.

    The short parameter arc of length ``eps`` traces the small left lobe from
    ``A = i eps/2`` to ``B = -i eps/2`` (speed about 1/eps); the remaining arc
    traces the large right lobe back to ``A`` at speed about 1.
    """
    if not 0 < eps < 1:
        raise CurveError("bowtie needs 0 < eps < 1")
    _params(n)
    A, B = 0.5j * eps, -0.5j * eps
    sl = 1.0 / (2 + 2 * np.sqrt(2.0)) * 1.0
    left = np.array([A, complex(-sl, sl), complex(-sl, -sl), B])
    right_perim = TWO_PI - eps
    sr = right_perim / (2 + 2 * np.sqrt(2.0))
    right = np.array([B, complex(sr, -sr), complex(sr, sr), A])
    n_left = max(4, int(round(n * eps / TWO_PI)) + 3)
    n_right = n - n_left
    t0 = -eps / 2
    tl, zl = _arclength_param(left, n_left, t0, eps, closed=False)
    tr, zr = _arclength_param(right, n_right, t0 + eps, TWO_PI - eps, closed=False)
    t = np.mod(np.concatenate([tl, tr]), TWO_PI)
    z = np.concatenate([zl, zr])
    order = np.argsort(t)
    return CircleEmbedding(t[order], z[order], symmetric=False, name=f"bowtie({eps})")


def trig_perturbation(amp_r: float = 0.1, k_r: int = 4, amp_t: float = 0.1, k_t: int = 2,
                      n: int = 256) -> CircleEmbedding:
    """Nodes (1 + amp_r sin(k_r t)) exp(i (t + amp_t sin(k_t t))); even k keep central symmetry."""
    t = _params(n)
    z = (1 + amp_r * np.sin(k_r * t)) * np.exp(1j * (t + amp_t * np.sin(k_t * t)))
    sym = n % 2 == 0 and k_r % 2 == 0 and k_t % 2 == 0
    if sym:
        z[n // 2:] = -z[: n // 2]
    return CircleEmbedding(t, z, symmetric=sym, name=f"trig({amp_r},{k_r},{amp_t},{k_t})")


FAMILIES = {
    "circle": lambda p, n: circle(complex(*_c(p.get("c", 0))), float(p.get("R", 1.0)), n),
    "ellipse": lambda p, n: ellipse(float(p.get("a", 2.0)), float(p.get("b", 1.0)), n),
    "polygon": lambda p, n: polygon([complex(*_c(v)) for v in p["vertices"]], n),
    "bowtie": lambda p, n: bowtie(float(p.get("eps", 0.1)), n),
    "trig": lambda p, n: trig_perturbation(float(p.get("amp_r", 0.1)), int(p.get("k_r", 4)),
                                           float(p.get("amp_t", 0.1)), int(p.get("k_t", 2)), n),
}


def _c(v):
    if isinstance(v, (list, tuple)):
        return float(v[0]), float(v[1])
    return float(v), 0.0


def make_embedding(spec: dict, n: int | None = None) -> CircleEmbedding:
    """Build an embedding from the curve JSON schema (named family or raw nodes)."""
    if "nodes" in spec:
        nodes = np.asarray(spec["nodes"], dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 3:
            raise CurveError("nodes must be [[t, re, im], ...]")
        return CircleEmbedding(nodes[:, 0], nodes[:, 1] + 1j * nodes[:, 2],
                               symmetric=bool(spec.get("symmetric", False)),
                               name=spec.get("name", "nodes"))
    fam = spec.get("family")
    if fam not in FAMILIES:
        raise CurveError(f"unknown family {fam!r}")
    n = int(n if n is not None else spec.get("n", 256))
    return FAMILIES[fam](spec.get("params", {}), n)
