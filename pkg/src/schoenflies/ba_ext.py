"""Beurling-Ahlfors type extension of circle homeomorphisms.

A sense-preserving homeomorphism psi of the unit circle is stored through its
lift chi (psi(e^{it}) = e^{i chi(t)}), piecewise linear between nodes.  With
chi(t) = s*t + c + p(t), p periodic and piecewise linear, the averaging
extension

    chi_e(x+iy) = 1/2 * int_{-1}^{1} chi(x+ty) (1 + 2i sgn t) dt

reduces to integrals of p over the window [x-y, x+y] and is evaluated exactly:

    Re chi_e = s x + c + A / (2y),   A = int_{x-y}^{x+y} p
    Im chi_e = s y + B / y,          B = int_x^{x+y} p - int_{x-y}^x p

Window integrals are summed segment by segment relative to p(x), which keeps
full accuracy as y -> 0.  The disk map is Psi(e^{iz}) = exp(i chi_e(z)).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .harmonic import CheckResult

TWO_PI = 2.0 * np.pi
E4PI = float(np.exp(4 * np.pi))


class LiftError(ValueError):
    pass


class InverseError(RuntimeError):
    pass


@dataclass(frozen=True)
class CircleHomeoLift:
    """Increasing piecewise-linear lift; chi(t + 2 pi) = chi(t) + increment.

    ``increment`` is 2 pi for circle homeomorphisms.  Other positive values are
    accepted so that lifts of degree-d maps (chi(t) = 2t, say) can be fed through
    the same closed-form extension.
    """
    t: np.ndarray
    chi: np.ndarray
    pi_equivariant: bool = False
    increment: float = TWO_PI

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        chi = np.asarray(self.chi, dtype=float)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "chi", chi)
        if t.ndim != 1 or t.shape != chi.shape or len(t) < 2:
            raise LiftError("need matching 1-d node arrays with at least two nodes")
        if t[0] < 0 or t[-1] >= TWO_PI or np.any(np.diff(t) <= 0):
            raise LiftError("node parameters must increase within [0, 2pi)")
        if np.any(np.diff(chi) <= 0) or chi[-1] >= chi[0] + self.increment:
            raise LiftError("lift values are not strictly increasing")
        # chi = s t + c + p(t); p vanishes at the first node
        s = self.increment / TWO_PI
        c = chi[0] - s * t[0]
        tt = np.append(t, t[0] + TWO_PI)
        pp = np.append(chi - s * t - c, 0.0)
        slope = np.diff(pp) / np.diff(tt)
        seg = pp[:-1] * np.diff(tt) + 0.5 * slope * np.diff(tt) ** 2
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        object.__setattr__(self, "_s", s)
        object.__setattr__(self, "_c", c)
        object.__setattr__(self, "_tt", tt)
        object.__setattr__(self, "_pp", pp)
        object.__setattr__(self, "_slope", slope)
        object.__setattr__(self, "_cum", cum)

    @property
    def n(self) -> int:
        return len(self.t)

    @property
    def nodes(self) -> np.ndarray:
        return np.column_stack([self.t, self.chi])

    # -- piecewise-linear pieces -------------------------------------------------

    def _locate(self, x):
        x = np.asarray(x, dtype=float)
        m = np.floor((x - self._tt[0]) / TWO_PI)
        r = x - m * TWO_PI
        k = np.clip(np.searchsorted(self._tt, r, side="right") - 1, 0, self.n - 1)
        return m, k, r - self._tt[k]

    def _p(self, x):
        _, k, h = self._locate(x)
        return self._pp[k] + self._slope[k] * h

    def _integral(self, a, b, p0):
        """int_a^b (p(t) - p0) dt for a <= b, summed piece by piece (no cancellation
        between large antiderivative values when the window is short)."""
        n = self.n
        ma, ka, ha = self._locate(a)
        mb, kb, hb = self._locate(b)
        ga = ma * n + ka
        gb = mb * n + kb
        pa = self._pp[ka] + self._slope[ka] * ha - p0
        pb = self._pp[kb] + self._slope[kb] * hb - p0
        same = ga == gb
        seg_len = np.diff(self._tt)
        len1 = seg_len[ka] - ha
        piece1 = 0.5 * len1 * (pa + self._pp[(ka + 1)] - p0)
        piece2 = 0.5 * hb * (self._pp[kb] - p0 + pb)
        g1 = ga + 1
        full = ((np.floor(gb / n) - np.floor(g1 / n)) * self._cum[-1]
                + self._cum[np.mod(gb, n).astype(int)] - self._cum[np.mod(g1, n).astype(int)])
        full = full - p0 * ((mb - np.floor(g1 / n)) * TWO_PI
                            + self._tt[np.mod(gb, n).astype(int)] - self._tt[np.mod(g1, n).astype(int)])
        return np.where(same, 0.5 * (b - a) * (pa + pb), piece1 + full + piece2)

    def _window(self, x, y):
        """(p(x), A - 2y p(x), B, same-segment mask) for the window [x - y, x + y];
        A = int p over the window, B = int_x^{x+y} p - int_{x-y}^x p."""
        p0 = self._p(x)
        left = self._integral(x - y, x, p0)
        right = self._integral(x, x + y, p0)
        _, k1, _ = self._locate(x - y)
        m1 = np.floor((x - y - self._tt[0]) / TWO_PI)
        m2 = np.floor((x + y - self._tt[0]) / TWO_PI)
        _, k2, _ = self._locate(x + y)
        same = (m1 * self.n + k1) == (m2 * self.n + k2)
        return p0, left + right, right - left, same

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self._s * t + self._c + self._p(t)

    def inverse(self, u):
        """chi^{-1}, the lift of psi^{-1}."""
        u = np.asarray(u, dtype=float)
        xs = np.append(self.chi, self.chi[0] + self.increment)
        ts = self._tt
        m = np.floor((u - xs[0]) / self.increment)
        r = u - m * self.increment
        k = np.clip(np.searchsorted(xs, r, side="right") - 1, 0, self.n - 1)
        lam = (r - xs[k]) / (xs[k + 1] - xs[k])
        return ts[k] + lam * (ts[k + 1] - ts[k]) + m * TWO_PI

    def psi(self, w):
        """The circle map itself on unimodular w."""
        return np.exp(1j * self(np.angle(np.asarray(w, dtype=complex))))

    def equivariance_defect(self) -> float:
        """max |chi(t + pi) - chi(t) - pi| (checked at all breakpoints)."""
        pts = np.concatenate([self.t, self.t - np.pi])
        return float(np.max(np.abs(self(pts + np.pi) - self(pts) - self.increment / 2)))

    def notfar_defect(self, samples: int = 4096) -> float:
        """max over a dense sample of |chi(t) - t - chi(0)| - 2 pi; should be <= 0."""
        t = np.concatenate([np.linspace(0, TWO_PI, samples), self.t])
        return float(np.max(np.abs(self(t) - t - self(0.0))) - TWO_PI)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {"nodes": [[float(a), float(b)] for a, b in zip(self.t, self.chi)],
                "pi_equivariant": bool(self.pi_equivariant)}

    @classmethod
    def from_json(cls, d: dict) -> "CircleHomeoLift":
        nodes = np.asarray(d["nodes"], dtype=float).reshape(-1, 2)
        return cls(nodes[:, 0].copy(), nodes[:, 1].copy(), bool(d.get("pi_equivariant", False)))


def lift(t, values, equivariance_tol: float = 1e-9) -> CircleHomeoLift:
    """Lift samples (t_k, psi(e^{i t_k})) of a sense-preserving circle map.

    Arguments are chosen segment by segment with increments in (0, 2 pi); the
    increments must add up to exactly one turn.  The branch is fixed by
    chi(0) in [0, 2 pi).
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=complex)
    if t.shape != v.shape or t.ndim != 1 or len(t) < 3:
        raise LiftError("need at least three samples")
    if np.any(np.diff(t) <= 0) or t[-1] - t[0] >= TWO_PI:
        raise LiftError("sample parameters must increase and span less than one turn")
    if np.any(np.abs(np.abs(v) - 1) > 1e-9):
        raise LiftError("sample values must be unimodular")
    # rotate so that parameters lie in [0, 2 pi)
    tr = np.mod(t, TWO_PI)
    j = int(np.argmin(tr))
    t = np.roll(tr, -j)
    v = np.roll(v, -j)
    if np.any(np.diff(t) <= 0):
        raise LiftError("sample parameters must increase")
    inc = np.mod(np.angle(np.roll(v, -1) / v), TWO_PI)
    if np.any(inc <= 0):
        raise LiftError("values are not strictly monotone on the circle")
    if abs(inc.sum() - TWO_PI) > 1e-9:
        raise LiftError("values wind more than once around the circle")
    chi = np.angle(v[0]) + np.concatenate([[0.0], np.cumsum(inc[:-1])])
    out = CircleHomeoLift(t, chi)
    shift = TWO_PI * np.floor(float(out(0.0)) / TWO_PI)
    out = CircleHomeoLift(t, chi - shift)
    eq = out.equivariance_defect() <= equivariance_tol
    return CircleHomeoLift(out.t, out.chi, eq)


def identity_lift(n: int = 64) -> CircleHomeoLift:
    t = TWO_PI * np.arange(n) / n
    return CircleHomeoLift(t, t.copy(), n % 2 == 0)


# --- the half-plane extension ----------------------------------------------------

def _split(z):
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    if np.any(y <= 0):
        raise ValueError("extension needs Im z > 0")
    return x, y


def ba_extend(chi: CircleHomeoLift, z):
    x, y = _split(z)
    p0, At, B, _ = chi._window(x, y)
    re = chi._s * x + chi._c + p0 + At / (2 * y)
    im = chi._s * y + B / y
    return re + 1j * im


def ba_jacobian(chi: CircleHomeoLift, z) -> np.ndarray:
    """Real 2x2 derivative of chi_e, shape (..., 2, 2)."""
    x, y = _split(z)
    p0, At, B, same = chi._window(x, y)
    qp, qm = chi._p(x + y) - p0, chi._p(x - y) - p0
    s = chi._s
    J = np.empty(x.shape + (2, 2))
    J[..., 0, 0] = s + (qp - qm) / (2 * y)
    J[..., 0, 1] = (qp + qm) / (2 * y) - At / (2 * y * y)
    J[..., 1, 0] = (qp + qm) / y
    J[..., 1, 1] = s + (qp - qm) / y - B / (y * y)
    # inside a single segment chi is affine and chi_e(x+iy) = chi(x) + i chi'(x) y
    if np.any(same):
        _, k, _ = chi._locate(x[same])
        d = s + chi._slope[k]
        J[same] = d[:, None, None] * np.eye(2)
    return J


def singular_values(J) -> tuple[np.ndarray, np.ndarray]:
    """(largest, smallest) singular value of 2x2 matrices; ||J|| and 1/||J^{-1}||."""
    J = np.asarray(J, dtype=float)
    a, b, c, d = J[..., 0, 0], J[..., 0, 1], J[..., 1, 0], J[..., 1, 1]
    T = a * a + b * b + c * c + d * d
    det = a * d - b * c
    disc = np.sqrt(np.maximum(T * T - 4 * det * det, 0.0))
    big = np.sqrt(0.5 * (T + disc))
    small = np.abs(det) / np.where(big > 0, big, 1.0)
    return big, small


def complex_matrix(c) -> np.ndarray:
    """Real 2x2 matrix of multiplication by c."""
    c = np.asarray(c, dtype=complex)
    M = np.empty(c.shape + (2, 2))
    M[..., 0, 0] = c.real
    M[..., 0, 1] = -c.imag
    M[..., 1, 0] = c.imag
    M[..., 1, 1] = c.real
    return M


def maxstr_bound(chi, z):
    x, y = _split(z)
    return 2 * (chi(x + y) - chi(x - y)) / y


def minstr_bound(chi, z):
    x, y = _split(z)
    den = np.minimum(chi(x + y) - chi(x + y / 2), chi(x - y / 2) - chi(x - y))
    return 4 * y / den


# --- the disk map ---------------------------------------------------------------

def _disk_coords(zeta):
    zeta = np.asarray(zeta, dtype=complex)
    r = np.abs(zeta)
    if np.any(r > 1 + 1e-15):
        raise ValueError("disk map needs |zeta| <= 1")
    with np.errstate(divide="ignore"):
        delta = -np.log(r)
    return zeta, np.angle(zeta), delta


def psi_disk(chi: CircleHomeoLift, zeta):
    zeta, th, delta = _disk_coords(zeta)
    out = np.zeros(zeta.shape, dtype=complex)
    inner = (delta > 0) & np.isfinite(delta)
    bdry = delta <= 0
    if np.any(inner):
        out[inner] = np.exp(1j * ba_extend(chi, th[inner] + 1j * delta[inner]))
    if np.any(bdry):
        out[bdry] = np.exp(1j * chi(th[bdry]))
    return out


def psi_jacobian(chi: CircleHomeoLift, zeta):
    """(Psi(zeta), DPsi(zeta)) for 0 < |zeta| < 1, by the chain rule through chi_e."""
    zeta, th, delta = _disk_coords(zeta)
    if np.any(~((delta > 0) & np.isfinite(delta))):
        raise ValueError("Jacobian of Psi needs 0 < |zeta| < 1")
    z = th + 1j * delta
    w = np.exp(1j * ba_extend(chi, z))
    J = complex_matrix(1j * w) @ ba_jacobian(chi, z) @ complex_matrix(1.0 / (1j * zeta))
    return w, J


def psi_inverse(chi: CircleHomeoLift, w, tol: float = 1e-12, max_newton: int = 60):
    """Solve Psi(zeta) = w.  Newton in half-plane coordinates, nested bisection fallback."""
    w = np.asarray(w, dtype=complex)
    r = np.abs(w)
    if np.any(r > 1 + 1e-15):
        raise ValueError("psi_inverse needs |w| <= 1")
    out = np.zeros(w.shape, dtype=complex)
    bdry = r >= 1
    if np.any(bdry):
        out[bdry] = np.exp(1j * chi.inverse(np.angle(w[bdry])))
    inner = (r > 0) & ~bdry
    if not np.any(inner):
        return out
    X = np.angle(w[inner])
    Y = -np.log(r[inner])
    target = X + 1j * Y
    z = chi.inverse(X) + 1j * Y
    ok = np.zeros(X.shape, dtype=bool)
    res = ba_extend(chi, z) - target
    for _ in range(max_newton):
        act = ~ok
        if not np.any(act):
            break
        J = ba_jacobian(chi, z[act])
        rhs = np.stack([res[act].real, res[act].imag], axis=-1)[..., None]
        step = np.linalg.solve(J, rhs)[..., 0]
        dz = step[..., 0] + 1j * step[..., 1]
        lam = np.ones(dz.shape)
        za = z[act]
        ra = np.abs(res[act])
        new = za - dz
        for _ in range(30):
            bad = new.imag <= 0
            if np.any(~bad):
                nr = np.full(new.shape, np.inf)
                nr[~bad] = np.abs(ba_extend(chi, new[~bad]) - target[act][~bad])
                bad |= nr > ra
            if not np.any(bad):
                break
            lam[bad] *= 0.5
            new[bad] = za[bad] - lam[bad] * dz[bad]
        stay = new.imag <= 0
        new[stay] = za[stay]
        z[act] = new
        res[act] = ba_extend(chi, new) - target[act]
        ok = np.abs(res) <= tol
    if not np.all(ok):
        idx = np.flatnonzero(~ok)
        z[idx] = _bisect_inverse(chi, target[idx])
        res[idx] = ba_extend(chi, z[idx]) - target[idx]
        # steep segments (crowded prevertices) amplify the last ulp of z, so the
        # residual is judged relative to the local stretch
        big, _ = singular_values(ba_jacobian(chi, z[idx]))
        bad = np.abs(res[idx]) > 1e3 * tol * np.maximum(1.0, big)
        if np.any(bad):
            worst = float(np.max(np.abs(res[idx][bad])))
            raise InverseError(f"psi_inverse failed for {int(bad.sum())} "
                               f"points (worst residual {worst:.3e})")
    out[inner] = np.exp(1j * z)
    return out


def _bisect_inverse(chi: CircleHomeoLift, target, iters: int = 64):
    """chi_e^{-1} by nested bisection.

    For fixed y, Re chi_e is increasing in x; along the curve where Re chi_e equals
    the target, Im chi_e is increasing in y.  Both brackets come from the range of
    the periodic part of chi.
    """
    X, Y = target.real, target.imag
    s = chi._s
    lo_p = chi._c + chi._pp.min()
    hi_p = chi._c + chi._pp.max()
    osc = chi._pp.max() - chi._pp.min()

    def solve_x(y):
        a = (X - hi_p) / s - 1e-9
        b = (X - lo_p) / s + 1e-9
        for _ in range(iters):
            mid = 0.5 * (a + b)
            f = ba_extend(chi, mid + 1j * y).real - X
            a = np.where(f < 0, mid, a)
            b = np.where(f < 0, b, mid)
        return 0.5 * (a + b)

    ya = np.maximum((Y - osc) / s, 1e-300) * 0.5
    yb = (Y + osc) / s + 1.0
    for _ in range(iters):
        ym = 0.5 * (ya + yb)
        xm = solve_x(ym)
        f = ba_extend(chi, xm + 1j * ym).imag - Y
        ya = np.where(f < 0, ym, ya)
        yb = np.where(f < 0, yb, ym)
    y = 0.5 * (ya + yb)
    return solve_x(y) + 1j * y


# --- derivative estimates ---------------------------------------------------------

def _arc_diam(length):
    return 2 * np.sin(np.minimum(length, np.pi) / 2)


@dataclass
class PsiBounds:
    """Measured norms of DPsi and the bounds they must respect, per point."""
    zeta: np.ndarray
    norm: np.ndarray          # ||DPsi||
    inv_norm: np.ndarray      # ||DPsi^{-1}||
    chain_norm: np.ndarray    # e^{4 pi} ||Dchi_e||
    chain_inv: np.ndarray     # e^{4 pi} ||Dchi_e^{-1}||
    bound_norm: np.ndarray    # case-split upper bound for ||DPsi||
    bound_inv: np.ndarray     # case-split upper bound for ||DPsi^{-1}||
    modulus_ratio: np.ndarray  # |Psi(zeta)| / |zeta|


def psi_jacobian_bounds(chi: CircleHomeoLift, zeta) -> PsiBounds:
    if not chi.pi_equivariant:
        raise LiftError("derivative estimates need chi(t + pi) = chi(t) + pi")
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    w, J = psi_jacobian(chi, zeta)
    big, small = singular_values(J)
    th = np.angle(zeta)
    d = -np.log(np.abs(zeta))
    Jc = ba_jacobian(chi, th + 1j * d)
    cb, cs = singular_values(Jc)
    # images of the four arcs: sigma_1 = [chi(th-2d), chi(th-d)], ..., sigma_4
    c = lambda k: chi(th + k * d)
    gap_in = c(1) - c(-1)
    gap_out = TWO_PI - (c(2) - c(-2))
    dist14 = 2 * np.sin(np.clip(np.minimum(gap_in, gap_out), 0.0, np.pi) / 2)
    diam2 = _arc_diam(c(-0.5) - c(-1))
    diam3 = _arc_diam(c(1) - c(0.5))
    r = np.abs(zeta)
    with np.errstate(divide="ignore"):
        b1 = np.where(r > np.exp(-np.pi / 4), E4PI * np.pi * dist14 / d, 20 * E4PI)
        b2 = np.where(r > np.exp(-2 * np.pi), 4 * E4PI * d / np.minimum(diam2, diam3), 16 * E4PI)
    return PsiBounds(zeta, big, 1.0 / small, E4PI * cb, E4PI / cs, b1, b2, np.abs(w) / r)


def check_psi(chi: CircleHomeoLift, zeta) -> list[CheckResult]:
    """Inequalities for Psi at the given points, worst case over the points."""
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    th = np.angle(zeta)
    d = -np.log(np.abs(zeta))
    z = th + 1j * d
    Jc = ba_jacobian(chi, z)
    cb, cs = singular_values(Jc)
    out = []

    def worst(name, lhs, rhs):
        k = int(np.argmax(lhs - rhs))
        out.append(CheckResult(name, float(lhs[k]), float(rhs[k])))

    worst("maxstr", cb, maxstr_bound(chi, z))
    worst("minstr", 1.0 / cs, minstr_bound(chi, z))
    worst("imext", np.abs(ba_extend(chi, z).imag - d), np.full(d.shape, 2 * chi.increment))
    w = psi_disk(chi, zeta)
    worst("modext_lower", np.exp(-4 * np.pi) * np.abs(zeta), np.abs(w))
    worst("modext_upper", np.abs(w), E4PI * np.abs(zeta))
    if chi.pi_equivariant:
        b = psi_jacobian_bounds(chi, zeta)
        worst("chainPsi", b.norm, b.chain_norm)
        worst("chainPsi_inverse", b.inv_norm, b.chain_inv)
        worst("BAderest1", b.norm, b.bound_norm)
        worst("BAderest2", b.inv_norm, b.bound_inv)
    return out
