"""Numerical Riemann maps by the geodesic zipper algorithm.

The boundary nodes z_0, ..., z_{N-1} are "unzipped" one at a time by elementary
slit maps of the upper half-plane H.  The first map opens the circular arc
through z_0, z_1, z_2 so that points on a circle are handled exactly.  After all
nodes are processed the two complementary domains of the curve sit in the first
and second quadrant; a signed square and a Mobius map send the requested side
onto the unit disk (interior map) or onto its exterior (exterior map).

Each slit step is ``u -> sqrt(m(u)^2 + d^2)`` with ``m(u) = u / (1 - u c)``, the
Mobius map straightening the geodesic through the current tip.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import CircleEmbedding, CurveError, project_to_polyline, set_diam, winding_number

TWO_PI = 2.0 * np.pi


class ConformalMapError(RuntimeError):
    pass


def _slit(w, d):
    """Branch of sqrt(w^2 + d^2) mapping H minus [0, i d] onto H."""
    return w * np.sqrt(1.0 + (d * d) / (w * w))


def _unslit(v, d):
    return v * np.sqrt(1.0 - (d * d) / (v * v))


def _real_slit(x, d):
    return np.sign(x) * np.sqrt(x * x + d * d)


@dataclass
class _Chain:
    """The raw zipper: node data and slit parameters, independent of the side."""
    z0: complex
    z1: complex
    rot: complex          # unit factor rotating the first circle onto R
    cinv: np.ndarray      # per step 1/c, c = |a|^2 / Re a
    d: np.ndarray         # per step slit height |a|^2 / Im a
    zinv: float           # 1 / (final image of z_0)
    side_a: np.ndarray    # node images on the positive side, after the final Mobius map
    side_b: np.ndarray    # node images on the negative side

    @classmethod
    def build(cls, nodes: np.ndarray) -> "_Chain":
        z = np.asarray(nodes, dtype=complex)
        N = len(z)
        z0, z1, z2 = z[0], z[1], z[2]
        rot = np.exp(-1j * np.angle((z2 - z1) / (z2 - z0)))
        u = 1j * np.sqrt(rot * (z[2:] - z1) / (z[2:] - z0))
        cinv = np.empty(N - 2)
        d = np.empty(N - 2)
        # real images on each side; index j -> node j, node 0 tracked separately
        ra = np.full(N, np.nan)
        rb = np.full(N, np.nan)
        zeta0 = np.inf
        for j in range(N - 2):
            a = u[j]
            if not a.imag > 0:
                raise ConformalMapError(f"node {j + 2} left the upper half-plane (crowding)")
            aa = abs(a) ** 2
            cj = a.real / aa
            dj = aa / a.imag
            cinv[j], d[j] = cj, dj
            # previously processed nodes (real)
            done = slice(1, j + 1)
            for r in (ra, rb):
                x = r[done]
                x = x / (1 - x * cj)
                r[done] = _real_slit(x, dj)
            # node j + 1 was the tip: it splits into +d / -d
            ra[j + 1], rb[j + 1] = dj, -dj
            if np.isinf(zeta0):
                zeta0 = -1.0 / cj if cj != 0 else np.inf
            else:
                zeta0 = zeta0 / (1 - zeta0 * cj) if zeta0 * cj != 1 else np.inf
            if not np.isinf(zeta0):
                zeta0 = float(_real_slit(zeta0, dj))
            rest = u[j + 1:]
            w = rest / (1 - rest * cj)
            u[j + 1:] = _slit(w, dj)
            u[j] = 0.0
        ra[N - 1] = rb[N - 1] = 0.0
        zinv = 0.0 if np.isinf(zeta0) else 1.0 / zeta0
        for r in (ra, rb):
            x = r[1:]
            r[1:] = x / (1 - x * zinv)
        ra[0] = rb[0] = np.inf
        return cls(z0, z1, rot, cinv, d, zinv, ra, rb)

    def node_angles_mp(self, kind: str, sign: int, rot: complex, bits: int = 256) -> np.ndarray:
        """Boundary angles of the nodes, computed in multiprecision.

        Near sharp spikes the slit heights grow by many orders of magnitude and
        the node images crowd together on a scale far below double resolution,
        although their final angles are still well separated.  The slit
        parameters themselves are fine in double, so they are reused here and
        only the node images, the normalization point and the angles are redone.
        """
        import gmpy2
        from gmpy2 import mpc, mpfr

        ctx = gmpy2.get_context().copy()
        ctx.precision = bits
        with gmpy2.context(ctx):
            N = len(self.d) + 2
            inf = mpfr("inf")
            ra = [None] * N
            rb = [None] * N
            zeta0 = None
            rot0 = mpc(complex(self.rot))
            if kind == "interior":
                z0, z1 = mpc(complex(self.z0)), mpc(complex(self.z1))
                q = rot0 * z1 / z0
            else:
                q = rot0
            u = mpc(0, 1) * gmpy2.sqrt(q)
            for j in range(N - 2):
                cj, dj = mpfr(float(self.cinv[j])), mpfr(float(self.d[j]))
                d2 = dj * dj
                for r in (ra, rb):
                    for k in range(1, j + 1):
                        x = r[k] / (1 - r[k] * cj)
                        r[k] = gmpy2.copy_sign(gmpy2.sqrt(x * x + d2), x)
                ra[j + 1], rb[j + 1] = dj, -dj
                if zeta0 is None or gmpy2.is_infinite(zeta0):
                    zeta0 = -1 / cj if cj != 0 else inf
                else:
                    zeta0 = zeta0 / (1 - zeta0 * cj) if zeta0 * cj != 1 else inf
                if not gmpy2.is_infinite(zeta0):
                    zeta0 = gmpy2.copy_sign(gmpy2.sqrt(zeta0 * zeta0 + d2), zeta0)
                w = u / (1 - u * cj)
                u = w * gmpy2.sqrt(1 + d2 / (w * w))
            ra[N - 1] = rb[N - 1] = mpfr(0)
            zinv = mpfr(0) if gmpy2.is_infinite(zeta0) else 1 / zeta0
            m0 = u / (1 - u * zinv)
            m0c = m0.conjugate()
            side = ra if sign > 0 else rb
            rot1 = mpc(complex(rot))
            out = np.empty(N)
            out[0] = float(gmpy2.phase(rot1))
            for k in range(1, N):
                x = side[k] / (1 - side[k] * zinv)
                near = (x - m0) * (x + m0)
                far = (x - m0c) * (x + m0c)
                val = rot1 * (near / far if kind == "interior" else far / near)
                out[k] = float(gmpy2.phase(val))
        return out

    # -- complex evaluation ------------------------------------------------------

    def forward(self, z, with_derivative: bool = False):
        """Curve plane -> quadrant picture (before the signed square)."""
        z = np.asarray(z, dtype=complex)
        q = self.rot * (z - self.z1) / (z - self.z0)
        u = 1j * np.sqrt(q)
        der = None
        if with_derivative:
            # du/dz = i/(2 sqrt q) dq/dz = -(dq/dz) / (2u)
            der = -self.rot * (self.z1 - self.z0) / ((z - self.z0) ** 2 * 2 * u)
        for cj, dj in zip(self.cinv, self.d):
            den = 1 - u * cj
            w = u / den
            v = _slit(w, dj)
            if with_derivative:
                der = der * (w / v) / (den * den)
            u = v
        den = 1 - u * self.zinv
        m = u / den
        if with_derivative:
            der = der / (den * den)
            return m, der
        return m

    def forward_infinity(self):
        """Image of infinity and the derivative with respect to s = 1/z there."""
        u = 1j * np.sqrt(self.rot + 0j)
        der = -self.rot * (self.z0 - self.z1) / (2 * u)
        for cj, dj in zip(self.cinv, self.d):
            den = 1 - u * cj
            w = u / den
            v = _slit(w, dj)
            der = der * (w / v) / (den * den)
            u = v
        den = 1 - u * self.zinv
        return u / den, der / (den * den)

    def inverse(self, m, with_derivative: bool = False):
        """Quadrant picture -> curve plane; derivative is d(forward)/dz at the result."""
        m = np.asarray(m, dtype=complex)
        den = 1 + m * self.zinv
        u = m / den
        der = None
        if with_derivative:
            der = 1.0 / (1 - u * self.zinv) ** 2
        for cj, dj in zip(self.cinv[::-1], self.d[::-1]):
            w = _unslit(u, dj)
            un = w / (1 + w * cj)
            if with_derivative:
                der = der * (w / u) / (1 - un * cj) ** 2
            u = un
        q = -(u * u) / self.rot
        z = (q * self.z0 - self.z1) / (q - 1)
        if with_derivative:
            der = der * (-self.rot * (self.z1 - self.z0) / ((z - self.z0) ** 2 * 2 * u))
            return z, der
        return z


@dataclass
class ConformalMap:
    """Riemann map of the unit disk (``interior``) or its exterior onto a curve's domain.

    Normalization: interior maps fix 0 with positive derivative there; exterior maps
    fix infinity with ``Phi(z) = capacity * z + O(1)``.
    """
    kind: str
    chain: _Chain
    sign: int              # +1: domain is the first quadrant, -1: the second
    p: complex             # image of the normalization point in H
    rot: complex           # final rotation factor e^{i alpha}
    nodes: np.ndarray      # zipper points (on the curve)
    node_params: np.ndarray  # curve parameter of each zipper point
    table_t: np.ndarray    # boundary angles of the zipper points (unwrapped, increasing)
    capacity: float = float("nan")
    center: complex = 0.0
    boundary_index: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    odd: bool = False      # average with -Phi(-zeta) so central symmetry is exact

    # -- quadrant <-> disk --------------------------------------------------------

    def _root(self, h):
        return np.sqrt(h) if self.sign > 0 else -np.sqrt(-h)

    def _to_disk(self, m, der=None):
        # h - p = sign (m - m0)(m + m0); the factored form keeps the angular
        # resolution when m0 lies close to the real axis relative to its size
        m0 = self._root(self.p)
        near = (m - m0) * (m + m0)
        far = (m - np.conj(m0)) * (m + np.conj(m0))
        p, pc = self.p, np.conj(self.p)
        if self.kind == "interior":
            val = self.rot * near / far
            dval = self.rot * (p - pc) / (self.sign * far * far)
        else:
            val = self.rot * far / near
            dval = self.rot * (pc - p) / (self.sign * near * near)
        if der is None:
            return val
        return val, der * 2 * m * dval

    def _from_disk(self, zeta):
        tau = np.asarray(zeta, dtype=complex) / self.rot
        p, pc = self.p, np.conj(self.p)
        m0 = self._root(p)
        with np.errstate(invalid="ignore", divide="ignore"):
            if self.kind == "interior":
                delta = self.sign * tau * (pc - p) / (tau - 1)   # m^2 - m0^2
            else:
                delta = self.sign * tau * (p - pc) / (tau - 1)   # m^2 - conj(m0)^2
                m0 = np.conj(m0)
            m = self._root(self.sign * (m0 * m0 + delta))
            # one correction step relative to the nearer of +-m0
            plus = np.abs(m - m0) <= np.abs(m + m0)
            m = np.where(plus, m0 + delta / (m + m0), -m0 + delta / (m - m0))
        return m

    # -- public evaluators -------------------------------------------------------

    def _raw(self, zeta):
        return self.chain.inverse(self._from_disk(zeta)) + self.center

    def _raw_evaluate(self, zeta):
        m = self._from_disk(zeta)
        z, dz = self.chain.inverse(m, with_derivative=True)
        _, dtot = self._to_disk(m, dz)
        return z + self.center, 1.0 / dtot

    def _raw_inverse(self, w, der=False):
        m = self.chain.forward(np.asarray(w, dtype=complex) - self.center, with_derivative=der)
        return self._to_disk(*m) if der else self._to_disk(m)

    def __call__(self, zeta):
        """Phi(zeta); points on the unit circle use the boundary table."""
        zeta = np.asarray(zeta, dtype=complex)
        r = np.abs(zeta)
        on_t = np.abs(r - 1) < 1e-14
        out = np.empty(zeta.shape, dtype=complex)
        if np.any(~on_t):
            z = zeta[~on_t]
            out[~on_t] = 0.5 * (self._raw(z) - self._raw(-z)) if self.odd else self._raw(z)
        if np.any(on_t):
            out[on_t] = self.boundary(np.angle(zeta[on_t]))
        return out

    def derivative(self, zeta):
        return self.evaluate(zeta)[1]

    def evaluate(self, zeta):
        """(Phi, Phi') in one pass."""
        zeta = np.asarray(zeta, dtype=complex)
        w, dw = self._raw_evaluate(zeta)
        if self.odd:
            w2, dw2 = self._raw_evaluate(-zeta)
            w, dw = 0.5 * (w - w2), 0.5 * (dw + dw2)
        return w, dw

    def inverse(self, w):
        w = np.asarray(w, dtype=complex)
        if self.odd:
            return 0.5 * (self._raw_inverse(w) - self._raw_inverse(-w))
        return self._raw_inverse(w)

    def inverse_with_derivative(self, w):
        w = np.asarray(w, dtype=complex)
        z, dz = self._raw_inverse(w, der=True)
        if self.odd:
            z2, dz2 = self._raw_inverse(-w, der=True)
            z, dz = 0.5 * (z - z2), 0.5 * (dz + dz2)
        return z, dz

    def boundary(self, t):
        """phi(e^{it}) by linear interpolation of the boundary table."""
        tt = self.table_t
        t = np.asarray(t, dtype=float)
        base = tt[0]
        s = base + np.mod(t - base, TWO_PI)
        xs = np.append(tt, tt[0] + TWO_PI)
        ws = np.append(self.nodes, self.nodes[0]) + self.center
        k = np.clip(np.searchsorted(xs, s, side="right") - 1, 0, len(tt) - 1)
        lam = (s - xs[k]) / (xs[k + 1] - xs[k])
        return ws[k] + lam * (ws[k + 1] - ws[k])

    @property
    def boundary_table(self):
        """(t, boundary point) for each input node of the source curve."""
        i = self.boundary_index
        return np.mod(self.table_t[i], TWO_PI), self.nodes[i] + self.center

    @property
    def fine_table(self):
        return np.mod(self.table_t, TWO_PI), self.nodes + self.center

    # -- serialization -----------------------------------------------------------

    def to_json(self) -> dict:
        c = lambda z: [float(np.real(z)), float(np.imag(z))]
        ch = self.chain
        return {
            "kind": self.kind,
            "z0": c(ch.z0), "z1": c(ch.z1), "first_rotation": c(ch.rot),
            "slits": [[float(a), float(b)] for a, b in zip(ch.cinv, ch.d)],
            "final_zinv": float(ch.zinv),
            "side_a": [float(x) for x in ch.side_a[1:]],
            "side_b": [float(x) for x in ch.side_b[1:]],
            "sign": int(self.sign), "p": c(self.p), "rotation": c(self.rot),
            "nodes": [c(z) for z in self.nodes],
            "node_params": [float(s) for s in self.node_params],
            "table_t": [float(s) for s in self.table_t],
            "capacity": None if np.isnan(self.capacity) else float(self.capacity),
            "center": c(self.center),
            "boundary_index": [int(i) for i in self.boundary_index],
            "odd": bool(self.odd),
        }

    @classmethod
    def from_json(cls, d: dict) -> "ConformalMap":
        cz = lambda v: complex(v[0], v[1])
        sl = np.asarray(d["slits"], dtype=float).reshape(-1, 2)
        sa = np.concatenate([[np.inf], np.asarray(d["side_a"], dtype=float)])
        sb = np.concatenate([[np.inf], np.asarray(d["side_b"], dtype=float)])
        chain = _Chain(cz(d["z0"]), cz(d["z1"]), cz(d["first_rotation"]), sl[:, 0].copy(),
                       sl[:, 1].copy(), float(d["final_zinv"]), sa, sb)
        return cls(d["kind"], chain, int(d["sign"]), cz(d["p"]), cz(d["rotation"]),
                   np.array([cz(v) for v in d["nodes"]]), np.asarray(d["node_params"], dtype=float),
                   np.asarray(d["table_t"], dtype=float),
                   float("nan") if d["capacity"] is None else float(d["capacity"]),
                   cz(d["center"]), np.asarray(d["boundary_index"], dtype=int),
                   bool(d.get("odd", False)))


def _zipper_points(curve: CircleEmbedding, resolution: int | None):
    factor = 1 if resolution is None else max(1, -(-int(resolution) // curve.n))
    fine = curve.refined(factor)
    return fine.values.copy(), fine.t.copy(), np.arange(curve.n) * factor


class _Crowded(ConformalMapError):
    pass


def _normalize(chain, kind, pts, params, center, bidx, rotation, precise=False):
    if kind == "interior":
        m0, dm0 = chain.forward(np.array([0.0 + 0j]), with_derivative=True)
        m0, dm0 = complex(m0[0]), complex(dm0[0])
    else:
        m0, dm0 = chain.forward_infinity()
    sign = 1 if np.angle(m0) < np.pi / 2 else -1
    h0 = sign * m0 * m0
    if not h0.imag > 0:
        raise ConformalMapError("normalization point not mapped into the upper half-plane")
    cmap = ConformalMap(kind, chain, sign, h0, 1.0 + 0j, pts, params, np.zeros(len(pts)),
                        center=center, boundary_index=bidx)
    if kind == "interior":
        _, d0 = cmap._to_disk(np.array([m0]), np.array([dm0]))
        cmap.rot = np.exp(-1j * np.angle(d0[0]))
    else:
        # Phi^{-1}(w) ~ (p - conj p) / (dh/ds) * w as w -> infinity, s = 1/w
        dh = 2 * sign * m0 * dm0
        k = (h0 - np.conj(h0)) / dh
        cmap.rot = np.exp(-1j * np.angle(k))
        cmap.capacity = float(1.0 / abs(k))
    cmap.rot *= np.exp(1j * rotation)
    # boundary angles of the zipper points; node 0 sits at infinity of the half-plane
    if precise:
        t = np.unwrap(chain.node_angles_mp(kind, sign, cmap.rot))
    else:
        side = chain.side_a if sign > 0 else chain.side_b
        x = np.where(np.isinf(side), 0.0, side).astype(complex)
        b = cmap._to_disk(x)
        b[0] = cmap.rot
        t = np.unwrap(np.angle(b))
    if t[-1] < t[0]:
        raise ConformalMapError("boundary correspondence reverses orientation; "
                                "use a counterclockwise curve")
    if np.any(np.diff(t) <= 0) or t[-1] - t[0] >= TWO_PI:
        raise _Crowded("boundary correspondence is not monotone (prevertex crowding)")
    return cmap, t


def _build(curve: CircleEmbedding, kind: str, resolution: int | None, center: complex = 0.0,
           rotation: float = 0.0) -> ConformalMap:
    pts, params, bidx = _zipper_points(curve, resolution)
    if set_diam(pts) == 0 or np.min(np.abs(np.diff(np.append(pts, pts[0])))) <= 1e-14 * set_diam(pts):
        raise ConformalMapError("numerically coincident nodes")
    pts = pts - center
    if kind == "interior" and winding_number(pts, 0.0) == 0:
        raise ConformalMapError("curve does not surround the normalization point")
    chain = _Chain.build(pts)
    try:
        cmap, t = _normalize(chain, kind, pts, params, center, bidx, rotation)
    except _Crowded:
        try:
            cmap, t = _normalize(chain, kind, pts, params, center, bidx, rotation, precise=True)
        except _Crowded as e:
            raise ConformalMapError(str(e)) from None
    if curve.symmetric and center == 0:
        # pair node k with its antipode k + N/2 and average the angles
        h = len(t) // 2
        avg = 0.5 * (t[:h] + t[h:] - np.pi)
        t = np.concatenate([avg, avg + np.pi])
        if np.any(np.diff(t) <= 0):
            raise ConformalMapError("boundary correspondence is not monotone after symmetrization")
        cmap.odd = True
    cmap.table_t = t
    return cmap


def interior_map(curve: CircleEmbedding, resolution: int | None = None, rotation: float = 0.0):
    """Riemann map of the disk onto the bounded domain of ``curve`` with Phi(0) = 0."""
    return _build(curve, "interior", resolution, rotation=rotation)


def exterior_map(curve: CircleEmbedding, resolution: int | None = None, rotation: float = 0.0):
    """Riemann map of the exterior of the disk onto the unbounded domain of ``curve``."""
    return _build(curve, "exterior", resolution, rotation=rotation)


# --- boundary correspondence ------------------------------------------------------

def boundary_homeo(cmap: ConformalMap, curve: CircleEmbedding, tol: float = 1e-4):
    """Lift of psi = f^{-1} o phi, from the map's boundary table and the curve's nodes."""
    from .ba_ext import lift

    t, w = cmap.fine_table
    k, lam, dist = project_to_polyline(w, curve.values)
    if np.max(dist) > tol * curve.diam:
        raise ConformalMapError("boundary correspondence failure")
    tn = np.append(curve.t, curve.t[0] + TWO_PI)
    s = tn[k] + lam * (tn[k + 1] - tn[k])
    order = np.argsort(t, kind="stable")
    return lift(t[order], np.exp(1j * s[order]))


def arc_image(cmap: ConformalMap, arc, m: int = 64) -> np.ndarray:
    """Boundary points phi(e^{it}) for t in the arc: dense samples plus table nodes inside."""
    t = np.linspace(arc.t_lo, arc.t_hi, m)
    tt = cmap.table_t
    extra = []
    for shift in (-2, -1, 0, 1, 2):
        u = tt + shift * TWO_PI
        extra.append(u[(u > arc.t_lo) & (u < arc.t_hi)])
    return cmap.boundary(np.concatenate([t] + extra))


# --- inequality checks --------------------------------------------------------------

def verify_interior_derivative_bounds(cmap: ConformalMap, curve: CircleEmbedding, z: complex,
                                      inner: float | None = None, outer: float | None = None):
    """Koebe sandwich, distortion theorem and the two arc-image derivative bounds at z.

    ``inner``/``outer`` are radii with B(0, inner) in the domain and the domain in
    B(0, outer); by default the distance from 0 to the curve and max |f|.
    """
    from .harmonic import CheckResult, gamma_arcs
    from .curves import polyline_distance, set_dist

    if cmap.kind != "interior":
        raise ValueError("interior map required")
    z = complex(z)
    r = abs(z)
    if not 0 <= r < 1:
        raise ValueError("need |z| < 1")
    w, dw = cmap.evaluate(np.array([z]))
    d = abs(complex(dw[0]))
    v = curve.values
    rho = float(polyline_distance(w, v)[0])
    ell = float(polyline_distance([0.0], v)[0]) if inner is None else inner
    L = float(np.max(np.abs(v))) if outer is None else outer
    out = [CheckResult("Koebe_lower", rho, (1 - r * r) * d),
           CheckResult("Koebe_upper", (1 - r * r) * d, 4 * rho),
           CheckResult("Koebedist1_lower", ell * (1 - r) / (1 + r) ** 3, d),
           CheckResult("Koebedist1_upper", d, L * (1 + r) / (1 - r) ** 3)]
    if r > np.exp(-2 * np.pi):
        g = [arc_image(cmap, a) for a in gamma_arcs(z)]
        lg = np.log(1 / r)
        if r > np.exp(-np.pi / 4):
            out.append(CheckResult("confderest1", set_dist(g[0], g[3]) / (60000 * lg), d))
        out.append(CheckResult("confderest2", d, 2e6 * min(set_diam(g[1]), set_diam(g[2])) / lg))
    return out


def verify_exterior_derivative_bounds(cmap: ConformalMap, curve: CircleEmbedding, z: complex):
    """Capacity-diameter, Loewner distortion and the exterior derivative bounds at z."""
    from .harmonic import CheckResult, gamma_arcs
    from .curves import polyline_distance, set_dist

    if cmap.kind != "exterior":
        raise ValueError("exterior map required")
    z = complex(z)
    R = abs(z)
    if not R > 1:
        raise ValueError("need |z| > 1")
    w, dw = cmap.evaluate(np.array([z]))
    d = abs(complex(dw[0]))
    v = curve.values
    diam = curve.diam
    cap = cmap.capacity
    rho = float(polyline_distance(w, v)[0])
    lR = np.log(R)
    out = [CheckResult("capdiam_lower", 2 * cap, diam),
           CheckResult("capdiam_upper", diam, 4 * cap),
           CheckResult("Sigmadist_lower", 1 - 1 / R ** 2, d / cap),
           CheckResult("Sigmadist_upper", d / cap, 1 / (1 - 1 / R ** 2)),
           CheckResult("derdistext2", d, 4 * rho / lR)]
    if R < np.exp(np.pi / 4):
        out.append(CheckResult("derdistext1", rho / (5 * lR), d))
    g = [arc_image(cmap, a) for a in gamma_arcs(z)] if R < np.exp(2 * np.pi) else None
    if R < np.exp(np.pi / 4):
        out.append(CheckResult("extderest1", set_dist(g[0], g[3]) / (600000 * lR), d))
    else:
        out.append(CheckResult("extderest1", diam / 6, d))
    if R < np.exp(2 * np.pi):
        out.append(CheckResult("extderest2", d, 5e9 * min(set_diam(g[1]), set_diam(g[2])) / lR))
    else:
        out.append(CheckResult("extderest2", d, diam))
    return out
