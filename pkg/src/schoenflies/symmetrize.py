"""Winding symmetrization and the general (non-symmetric) extension pipeline.

The winding map W(r e^{i theta}) = r e^{2 i theta} doubles angles and keeps
moduli.  For a curve f around w0 the symmetrization g satisfies
W(g(e^{it})) = f(e^{2it}) - w0 and g(-z) = -g(z).  A centrally symmetric
extension G of g descends to an extension F(w) = W(G(s(w))) + w0 of f, where
s is a branch of W^{-1}; oddness of G makes the branch irrelevant.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import (CircleEmbedding, CurveError, bilipschitz_constants, embedding_constants,
                     incenter, polyline_distance, winding_number)
from .extend import GridSpec, PlaneExtension, extend_plane_symmetric, extension_report
from .harmonic import CheckResult

TWO_PI = 2.0 * np.pi


# --- the winding map -------------------------------------------------------------

def winding_map(z):
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(r > 0, z * z / np.where(r > 0, r, 1.0), 0.0)


def winding_inverse(w):
    """Branch s(r e^{i theta}) = r e^{i theta/2}, theta in [0, 2 pi); cut along the positive axis."""
    w = np.asarray(w, dtype=complex)
    th = np.mod(np.angle(w), TWO_PI)
    return np.abs(w) * np.exp(0.5j * th)


def wirtinger_matrix(a, b):
    """Real Jacobian of a map with f_z = a, f_zbar = b."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    M = np.empty(np.broadcast(a, b).shape + (2, 2))
    M[..., 0, 0] = (a + b).real
    M[..., 0, 1] = -(a - b).imag
    M[..., 1, 0] = (a + b).imag
    M[..., 1, 1] = (a - b).real
    return M


def winding_jacobian(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValueError("W is not differentiable at 0")
    r = np.abs(z)
    return wirtinger_matrix(1.5 * z / r, -0.5 * z ** 3 / r ** 3)


def winding_inverse_jacobian(w):
    w = np.asarray(w, dtype=complex)
    if np.any(w == 0):
        raise ValueError("W^{-1} is not differentiable at 0")
    s = winding_inverse(w)
    return wirtinger_matrix(0.75 * s / w, 0.25 * s / np.conj(w))


def winding_jacobian_norms(z):
    """Singular values (largest, smallest) of DW at z; always (2, 1)."""
    from .ba_ext import singular_values
    return singular_values(winding_jacobian(z))


# --- symmetrization ----------------------------------------------------------------

@dataclass
class WindingSymmetrization:
    source: CircleEmbedding
    w0: complex
    g: CircleEmbedding
    sign_choice: int = 1
    refined: CircleEmbedding | None = None   # the node set of f actually used

    def conjugacy_defect(self) -> float:
        """max over g's nodes of |W(g(e^{iu})) - (f(e^{2iu}) - w0)|."""
        u = self.g.t
        lhs = winding_map(self.g.values)
        rhs = self.source(np.mod(2 * u, TWO_PI)) - self.w0
        return float(np.max(np.abs(lhs - rhs)))

    def to_json(self) -> dict:
        return {"w0": [float(np.real(self.w0)), float(np.imag(self.w0))],
                "sign_choice": self.sign_choice, "g": self.g.to_json()}


def _refine_by_turn(f: CircleEmbedding, w0: complex, max_turn: float) -> CircleEmbedding:
    """Split segments whose angle about w0 turns by more than ``max_turn``."""
    v = f.values
    d = v - w0
    turn = np.abs(np.angle(np.roll(d, -1) / d))
    m = np.maximum(1, np.ceil(turn / max_turn).astype(int))
    if np.all(m == 1):
        return f
    tn = np.append(f.t, f.t[0] + TWO_PI)
    vn = np.append(v, v[0])
    ts, vs = [], []
    for k in range(f.n):
        lam = np.arange(m[k]) / m[k]
        ts.append(tn[k] + lam * (tn[k + 1] - tn[k]))
        vs.append(vn[k] + lam * (vn[k + 1] - vn[k]))
    t = np.mod(np.concatenate(ts), TWO_PI)
    j = int(np.argmin(t))
    return CircleEmbedding(np.roll(t, -j), np.roll(np.concatenate(vs), -j), name=f.name,
                           check=False)


def symmetrize(f: CircleEmbedding, w0: complex = 0.0, max_turn: float = 0.05,
               check: bool = True) -> WindingSymmetrization:
    """Winding symmetrization of f - w0, sampled at half parameters and their antipodes.

    Segments of f turning by more than ``max_turn`` radians about w0 are split first,
    so that the piecewise-linear g follows W^{-1} o f o W closely between nodes.
    """
    w0 = complex(w0)
    wn = winding_number(f, w0)
    if abs(wn) != 1:
        raise CurveError(f"winding number about w0 is {wn}, need +-1")
    fr = _refine_by_turn(f, w0, max_turn)
    d = fr.values - w0
    steps = np.angle(d[1:] / d[:-1])
    a = np.angle(d[0]) + np.concatenate([[0.0], np.cumsum(steps)])
    half = np.abs(d) * np.exp(0.5j * a)
    u = fr.t / 2
    g = CircleEmbedding(np.concatenate([u, u + np.pi]), np.concatenate([half, -half]),
                        symmetric=True, name=f"sym({f.name})", check=check)
    return WindingSymmetrization(f, w0, g, 1, fr)


def symmetrize_recentred(f: CircleEmbedding, **kw) -> WindingSymmetrization:
    return symmetrize(f, incenter(f).center, **kw)


def pair_ratio(curve: CircleEmbedding, t1: float, t2: float) -> float:
    """|f(e^{it1}) - f(e^{it2})| / |e^{it1} - e^{it2}|."""
    a, b = curve(np.array([t1, t2]))
    return float(abs(a - b) / abs(np.exp(1j * t1) - np.exp(1j * t2)))


def symmetrization_checks(sym: WindingSymmetrization, refine: int = 4):
    """Inradius sandwich, the symmetrization constants for a given basepoint, and the
    recentred form; returns (checks, report dict)."""
    f, g, w0 = sym.source, sym.g, sym.w0
    cf = embedding_constants(f, refine=refine)
    cg = bilipschitz_constants(g.domain_points, g.values)
    L, ell = cf.upper_L, cf.lower_l
    r = float(polyline_distance([w0], f.values)[0])
    checks = [CheckResult("prop84_upper", cg.upper_L, np.pi * L),
              CheckResult("prop84_lower", r * ell / (TWO_PI * L), cg.lower_l)]
    report = {"w0": [w0.real, w0.imag], "r_min": r,
              "empirical_f_constants": cf.to_json(),
              "empirical_g_constants": cg.to_json(),
              "conjugacy_defect": sym.conjugacy_defect(),
              "prop84_margins": {c.name: c.margin for c in checks}}
    return checks, report


def check_prop84(f: CircleEmbedding, sym: WindingSymmetrization, refine: int = 4):
    return symmetrization_checks(sym, refine)[0]


def check_inradius(f: CircleEmbedding, refine: int = 4, rel_tol: float = 1e-9):
    """ell <= R_I <= L with empirical constants (refined sampling) and the incenter search."""
    c = embedding_constants(f, refine=refine)
    R = incenter(f).radius
    tol = rel_tol * f.diam
    return [CheckResult("inradius_lower", c.lower_l - tol, R),
            CheckResult("inradius_upper", R, c.upper_L + tol)]


def check_cor85(f: CircleEmbedding, sym: WindingSymmetrization, refine: int = 4):
    """Recentred symmetrization is (pi L, ell^2 / (2 pi L)) bi-Lipschitz."""
    cf = embedding_constants(f, refine=refine)
    cg = bilipschitz_constants(sym.g.domain_points, sym.g.values)
    L, ell = cf.upper_L, cf.lower_l
    return [CheckResult("cor85_upper", cg.upper_L, np.pi * L),
            CheckResult("cor85_lower", ell * ell / (TWO_PI * L), cg.lower_l)]


def symmetrization_report(sym: WindingSymmetrization, recentred: bool = True) -> dict:
    checks, rep = symmetrization_checks(sym)
    if recentred:
        rep["cor85_margins"] = {c.name: c.margin for c in check_cor85(sym.source, sym)}
    return rep


# --- descending a symmetric extension ---------------------------------------------

class BranchError(RuntimeError):
    pass


@dataclass
class DesymmetrizedExtension:
    """F(w) = sign * W(G(s(w))) + w0 for an odd extension G."""
    G: PlaneExtension
    w0: complex
    curve: CircleEmbedding
    sign: int = 1

    @property
    def diam(self) -> float:
        return self.curve.diam

    @property
    def orientation(self) -> int:
        return self.G.orientation

    has_inner = True
    has_outer = True

    def __call__(self, w, branch: int = 1):
        u = branch * winding_inverse(w)
        return self.sign * winding_map(self.G(u)) + self.w0

    def jacobian(self, w):
        """(F, DF, DG at s(w)); w must avoid 0 and the unit circle."""
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        u = winding_inverse(w)
        gv, DG = self.G.jacobian(u)
        DF = self.sign * (winding_jacobian(gv) @ DG @ winding_inverse_jacobian(w))
        return self.sign * winding_map(gv) + self.w0, DF, DG

    def boundary_agreement(self, samples: int = 4096) -> dict:
        t = np.concatenate([np.linspace(0, TWO_PI, samples, endpoint=False), self.curve.t])
        err = np.abs(self(np.exp(1j * t)) - self.curve(t))
        return {"plane": float(np.max(err))}

    def modext2(self, z):
        return self.G.modext2(winding_inverse(z))

    def branch_defect(self, radii=None, n_theta: int = 64, eps: float = 1e-3) -> float:
        """max |F_s(w) - F_{-s}(w)| / max(|F_s(w) - w0|, diam) on rays around the cut."""
        if radii is None:
            radii = np.concatenate([np.geomspace(1e-3, 0.999, 16), np.geomspace(1.001, 1e3, 16)])
        th = np.concatenate([np.linspace(-eps, eps, n_theta), np.linspace(np.pi - eps, np.pi + eps, 8)])
        w = (np.asarray(radii)[:, None] * np.exp(1j * th)[None, :]).ravel()
        a = self(w, 1)
        scale = np.maximum(np.abs(a - self.w0), self.diam)
        return float(np.max(np.abs(a - self(w, -1)) / scale))


def desymmetrize_extension(G: PlaneExtension, w0: complex = 0.0, f: CircleEmbedding | None = None,
                           tol: float = 1e-8) -> DesymmetrizedExtension:
    w0 = complex(w0)
    curve = f if f is not None else _descend_curve(G.curve, w0)
    F = DesymmetrizedExtension(G, w0, curve, 1)
    scale = max(G.diam, 1.0)
    # oddness of G on a coarse test grid, then branch independence near the cut
    z = GridSpec.default(n_r=8, n_theta=32).points()
    odd = float(np.max(np.abs(G(-z) + G(z)) / np.maximum(np.abs(z), 1.0)))
    if odd > 1e-6 * scale:
        raise BranchError(f"G not centrally symmetric enough (defect {odd:.2e})")
    bd = F.branch_defect()
    if bd > tol:
        raise BranchError(f"G not centrally symmetric enough (branch defect {bd:.2e})")
    # sign vote over the nodes of f
    if f is not None:
        zt = np.exp(1j * f.t)
        base = winding_map(G(winding_inverse(zt)))
        plus = np.abs(base + w0 - f.values)
        minus = np.abs(-base + w0 - f.values)
        F.sign = 1 if np.sum(plus <= minus) * 2 >= f.n else -1
    return F


def _descend_curve(g: CircleEmbedding, w0: complex) -> CircleEmbedding:
    """The curve f with f o W = W o g + w0, from g's nodes in [0, pi)."""
    h = g.n // 2
    return CircleEmbedding(2 * g.t[:h], winding_map(g.values[:h]) + w0, name="descended",
                           check=False)


def extend_plane_general(f: CircleEmbedding, resolution: int | None = None,
                         grid: GridSpec | None = None, report: bool = True):
    """Symmetrize about the incenter, extend symmetrically, descend.  Returns (F, report)."""
    sym = symmetrize_recentred(f)
    G = extend_plane_symmetric(sym.g, resolution)
    F = desymmetrize_extension(G, sym.w0, f)
    if not report:
        return F, None
    rep = extension_report(F, grid, kind="general", constants=embedding_constants(f))
    rep["symmetrization"] = symmetrization_report(sym)
    rep["branch_defect"] = F.branch_defect()
    return F, rep
