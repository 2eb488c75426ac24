"""Extensions of circle embeddings to the disk, its exterior and the whole plane.

Inside the disk F = Phi o Psi^{-1}; outside F = Phi_e o r o Psi_e^{-1} o r with
r(z) = 1/conj(z).  Phi, Phi_e are Riemann maps of the two complementary domains
and Psi, Psi_e extend the circle maps f^{-1} o phi (phi = boundary map of Phi).
Clockwise curves are handled by conjugating the image.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import ba_ext
from .ba_ext import CircleHomeoLift, complex_matrix, singular_values
from .conformal import ConformalMap, boundary_homeo, exterior_map, interior_map
from .curves import CircleEmbedding, CurveError, embedding_constants

TWO_PI = 2.0 * np.pi
FLIP = np.diag([1.0, -1.0])

INTERIOR_BOUNDS = (1e13, 1e11)
GLOBAL_BOUNDS = (1e27, 1e23)


class OrientationFold(RuntimeError):
    def __init__(self, where):
        super().__init__(f"orientation fold: Jacobian determinant <= 0 at {where}")
        self.where = where


def _reflect(z):
    return 1.0 / np.conj(z)


def _reflect_jacobian(z):
    return FLIP @ complex_matrix(-1.0 / np.asarray(z, dtype=complex) ** 2)


@dataclass
class PlaneExtension:
    """F on the closed disk (``inner``) and, when present, on its exterior (``outer``)."""
    curve: CircleEmbedding
    inner_map: ConformalMap | None = None
    inner_lift: CircleHomeoLift | None = None
    outer_map: ConformalMap | None = None
    outer_lift: CircleHomeoLift | None = None
    flip: bool = False          # curve was clockwise: F = conj o (extension of conj o f)

    @property
    def diam(self) -> float:
        return self.curve.diam

    @property
    def orientation(self) -> int:
        """+1 when F preserves orientation (counterclockwise f), -1 otherwise."""
        return -1 if self.flip else 1

    @property
    def has_inner(self) -> bool:
        return self.inner_map is not None

    @property
    def has_outer(self) -> bool:
        return self.outer_map is not None

    def _out(self, w):
        return np.conj(w) if self.flip else w

    def inner(self, z):
        z = np.asarray(z, dtype=complex)
        zeta = ba_ext.psi_inverse(self.inner_lift, z)
        return self._out(self.inner_map(zeta))

    def outer(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) < 1 - 1e-15):
            raise ValueError("outer part is defined on |z| >= 1")
        u = ba_ext.psi_inverse(self.outer_lift, _reflect(z))
        return self._out(self.outer_map(_reflect(u)))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.empty(z.shape, dtype=complex)
        ins = np.abs(z) <= 1
        if np.any(ins):
            if not self.has_inner:
                raise ValueError("no interior part")
            out[ins] = self.inner(z[ins])
        if np.any(~ins):
            if not self.has_outer:
                raise ValueError("no exterior part")
            out[~ins] = self.outer(z[~ins])
        return out

    def jacobian(self, z):
        """(F(z), DF(z)) by the chain rule; z must avoid 0 and the unit circle."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        r = np.abs(z)
        if np.any((r == 0) | (r == 1)):
            raise ValueError("Jacobian is evaluated off 0 and the unit circle")
        F = np.empty(z.shape, dtype=complex)
        J = np.empty(z.shape + (2, 2))
        ins = r < 1
        if np.any(ins):
            zeta = ba_ext.psi_inverse(self.inner_lift, z[ins])
            w, dw = self.inner_map.evaluate(zeta)
            _, DP = ba_ext.psi_jacobian(self.inner_lift, zeta)
            F[ins] = w
            J[ins] = complex_matrix(dw) @ np.linalg.inv(DP)
        if np.any(~ins):
            zo = z[~ins]
            a = _reflect(zo)
            u = ba_ext.psi_inverse(self.outer_lift, a)
            b = _reflect(u)
            w, dw = self.outer_map.evaluate(b)
            _, DP = ba_ext.psi_jacobian(self.outer_lift, u)
            F[~ins] = w
            J[~ins] = (complex_matrix(dw) @ _reflect_jacobian(u) @ np.linalg.inv(DP)
                       @ _reflect_jacobian(zo))
        if self.flip:
            F = np.conj(F)
            J = FLIP @ J
        return F, J

    def boundary_agreement(self, samples: int = 4096) -> dict:
        """sup over circle samples (dense plus nodes) of |F - f| from each side."""
        t = np.concatenate([np.linspace(0, TWO_PI, samples, endpoint=False), self.curve.t])
        ref = self.curve(t)
        z = np.exp(1j * t)
        out = {}
        if self.has_inner:
            out["inner"] = float(np.max(np.abs(self.inner(z) - ref)))
        if self.has_outer:
            out["outer"] = float(np.max(np.abs(self.outer(z) - ref)))
        return out

    def modext2(self, z) -> np.ndarray:
        """|zeta|^2 |u|^2 for exterior points zeta, u = Psi_e^{-1}(r(zeta))."""
        z = np.asarray(z, dtype=complex)
        u = ba_ext.psi_inverse(self.outer_lift, _reflect(z))
        return np.abs(z) ** 2 * np.abs(u) ** 2


def _prepare(f: CircleEmbedding):
    if not f.symmetric:
        raise CurveError("the extension needs a centrally symmetric curve")
    if f.counterclockwise:
        return f, False
    g = CircleEmbedding(f.t, np.conj(f.values), symmetric=True, name=f.name, check=False)
    return g, True


def _part(g, kind, resolution):
    build = interior_map if kind == "interior" else exterior_map
    cmap = build(g, resolution)
    return cmap, boundary_homeo(cmap, g)


def extend_disk(f: CircleEmbedding, resolution: int | None = None) -> PlaneExtension:
    g, flip = _prepare(f)
    m, chi = _part(g, "interior", resolution)
    return PlaneExtension(f, m, chi, flip=flip)


def extend_exterior(f: CircleEmbedding, resolution: int | None = None) -> PlaneExtension:
    g, flip = _prepare(f)
    m, chi = _part(g, "exterior", resolution)
    return PlaneExtension(f, outer_map=m, outer_lift=chi, flip=flip)


def extend_plane_symmetric(f: CircleEmbedding, resolution: int | None = None) -> PlaneExtension:
    g, flip = _prepare(f)
    mi, ci = _part(g, "interior", resolution)
    me, ce = _part(g, "exterior", resolution)
    return PlaneExtension(f, mi, ci, me, ce, flip)


# --- grids and Jacobian reports ----------------------------------------------------

INNER_SPLITS = (1e-3, np.exp(-2 * np.pi), np.exp(-np.pi / 4), 1 - 1e-3)
OUTER_SPLITS = (1 + 1e-3, np.exp(np.pi / 4), np.exp(2 * np.pi), 1e3)


@dataclass
class GridSpec:
    """Polar grid: for each radial region (r_lo, r_hi), n_r log-spaced radii x n_theta angles."""
    regions: list = field(default_factory=list)
    n_r: int = 64
    n_theta: int = 256

    @classmethod
    def default(cls, inner: bool = True, outer: bool = True, n_r: int = 64,
                n_theta: int = 256) -> "GridSpec":
        regs = []
        if inner:
            regs += list(zip(INNER_SPLITS[:-1], INNER_SPLITS[1:]))
        if outer:
            regs += list(zip(OUTER_SPLITS[:-1], OUTER_SPLITS[1:]))
        return cls([(float(a), float(b)) for a, b in regs], n_r, n_theta)

    def radii(self, k: int) -> np.ndarray:
        a, b = self.regions[k]
        return np.geomspace(a, b, self.n_r)

    def points(self, k: int | None = None) -> np.ndarray:
        ks = range(len(self.regions)) if k is None else [k]
        th = TWO_PI * np.arange(self.n_theta) / self.n_theta
        r = np.unique(np.concatenate([self.radii(j) for j in ks]))
        return (r[:, None] * np.exp(1j * th)[None, :]).ravel()

    def to_json(self) -> dict:
        return {"regions": [list(r) for r in self.regions], "n_r": self.n_r, "n_theta": self.n_theta}


@dataclass
class JacobianReport:
    sup_DF: float
    sup_DF_inv: float
    witness_DF: complex
    witness_DF_inv: complex
    min_det: float            # min of orientation * det DF
    regions: list
    injective: bool
    near_pairs: int
    symmetry_defect: float | None
    points: int
    sup_inner_DF: float | None = None       # symmetric factor of a descended map, same grid
    sup_inner_DF_inv: float | None = None
    samples: dict | None = field(default=None, repr=False)   # per-point z, |DF|, |DF^-1|, det

    def to_json(self) -> dict:
        c = lambda z: [float(np.real(z)), float(np.imag(z))]
        return {"sup_DF": self.sup_DF, "sup_DF_inv": self.sup_DF_inv,
                "witness_DF": c(self.witness_DF), "witness_DF_inv": c(self.witness_DF_inv),
                "min_det": self.min_det, "regions": self.regions, "injective": self.injective,
                "near_pairs": self.near_pairs, "symmetry_defect": self.symmetry_defect,
                "points": self.points, "sup_inner_DF": self.sup_inner_DF,
                "sup_inner_DF_inv": self.sup_inner_DF_inv}


def jacobian_report(F, grid: GridSpec | None = None, symmetric: bool | None = None,
                    check_fold: bool = True, keep_samples: bool = False) -> JacobianReport:
    """Operator norms of DF and DF^{-1} over a polar grid, with witnesses.

    ``F`` is any object with ``jacobian(z) -> (values, matrices)`` and ``diam``.
    """
    if grid is None:
        grid = GridSpec.default(getattr(F, "has_inner", True), getattr(F, "has_outer", True))
    regs = []
    allz, allw, cols = [], [], []
    best = (-np.inf, 0j)
    best_inv = (-np.inf, 0j)
    min_det = np.inf
    inner = None
    for k, (a, b) in enumerate(grid.regions):
        z = grid.points(k)
        res = F.jacobian(z)
        w, J = res[0], res[1]
        if len(res) > 2:
            gb, gs = singular_values(res[2])
            cur = (float(np.max(gb)), float(np.max(1.0 / gs)))
            inner = cur if inner is None else (max(inner[0], cur[0]), max(inner[1], cur[1]))
        det = np.linalg.det(J) * getattr(F, "orientation", 1)
        big, small = singular_values(J)
        inv = 1.0 / small
        if check_fold and np.any(det <= 0):
            raise OrientationFold(complex(z[int(np.argmin(det))]))
        i, j = int(np.argmax(big)), int(np.argmax(inv))
        if big[i] > best[0]:
            best = (float(big[i]), complex(z[i]))
        if inv[j] > best_inv[0]:
            best_inv = (float(inv[j]), complex(z[j]))
        min_det = min(min_det, float(np.min(det)))
        regs.append({"r_lo": a, "r_hi": b, "sup_DF": float(big[i]), "sup_DF_inv": float(inv[j])})
        allz.append(z)
        allw.append(w)
        if keep_samples:
            cols.append(np.column_stack([z.real, z.imag, big, inv, det]))
    z = np.concatenate(allz)
    w = np.concatenate(allw)
    near = _near_pairs(z, w, 1e-9, best_inv[0])
    sym = None
    if symmetric if symmetric is not None else getattr(getattr(F, "curve", None), "symmetric", False):
        sym = float(np.max(np.abs(F(-z) + w)))
    samples = None
    if keep_samples:
        a = np.concatenate(cols)
        samples = {"x": a[:, 0], "y": a[:, 1], "norm_DF": a[:, 2], "norm_DF_inv": a[:, 3],
                   "det": a[:, 4]}
    return JacobianReport(best[0], best_inv[0], best[1], best_inv[1], min_det, regs, near == 0,
                          near, sym, int(z.size), *(inner or (None, None)), samples=samples)


def _near_pairs(z, w, tol, max_inv=np.inf) -> int:
    """Grid points with distinct domain positions but (numerically) equal images.

    Near sharp corners a homeomorphism can legitimately squeeze points closer
    than ``tol``; a pair only counts when its squeeze exceeds the measured sup of
    ||DF^{-1}|| by a factor 1000.
    """
    tree = cKDTree(np.column_stack([w.real, w.imag]))
    pairs = tree.query_pairs(tol, output_type="ndarray")
    if len(pairs) == 0:
        return 0
    dz = np.abs(z[pairs[:, 0]] - z[pairs[:, 1]])
    dw = np.abs(w[pairs[:, 0]] - w[pairs[:, 1]])
    return int(np.sum((dz > 1e-12) & (dw * max_inv < 1e-3 * dz)))


def finite_difference_jacobian(F, z, h: float = 1e-6) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    fx = (F(z + h) - F(z - h)) / (2 * h)
    fy = (F(z + 1j * h) - F(z - 1j * h)) / (2 * h)
    J = np.empty(z.shape + (2, 2))
    J[..., 0, 0], J[..., 0, 1] = fx.real, fy.real
    J[..., 1, 0], J[..., 1, 1] = fx.imag, fy.imag
    return J


def extension_report(F, grid: GridSpec | None = None, kind: str = "global",
                     constants=None, jacobian: JacobianReport | None = None) -> dict:
    """Boundary agreement, Jacobian extremes and the margins against the theorem bounds.

    ``kind`` selects the bound pair: ``interior`` (disk only), ``global`` (symmetric
    plane map) or ``general`` (after de-symmetrization; needs ``constants``).
    """
    curve = F.curve
    bl = constants if constants is not None else embedding_constants(curve)
    L, ell = bl.upper_L, bl.lower_l
    jr = jacobian if jacobian is not None else jacobian_report(F, grid)
    ba = F.boundary_agreement()
    if kind == "interior":
        up, lo = INTERIOR_BOUNDS[0] * L, INTERIOR_BOUNDS[1] / ell
    elif kind == "global":
        up, lo = GLOBAL_BOUNDS[0] * L, GLOBAL_BOUNDS[1] / ell
    else:
        up, lo = 1e28 * L, 1.0 / (1e-25 * ell * ell / L)
    margins = {"DF": up - jr.sup_DF, "DF_inv": lo - jr.sup_DF_inv,
               "DF_bound": up, "DF_inv_bound": lo}
    if jr.sup_inner_DF is not None:
        # |DF| <= 2 |DG| and |DF^{-1}| <= 2 |DG^{-1}| through the winding map
        margins["transport_DF"] = 2 * jr.sup_inner_DF * (1 + 1e-6) - jr.sup_DF
        margins["transport_DF_inv"] = 2 * jr.sup_inner_DF_inv * (1 + 1e-6) - jr.sup_DF_inv
    if getattr(F, "has_outer", False):
        g = grid if grid is not None else GridSpec.default(False, True)
        zs = np.concatenate([g.points(k) for k in range(len(g.regions))
                             if g.regions[k][0] >= 1])
        if zs.size:
            q = F.modext2(zs)
            margins["modext2_lower"] = float(np.min(q) - np.exp(-8 * np.pi))
            margins["modext2_upper"] = float(np.exp(8 * np.pi) - np.max(q))
    return {"curve": curve.name, "kind": kind, "boundary_agreement": ba,
            "boundary_agreement_rel": max(ba.values()) / curve.diam,
            "sup_DF": jr.sup_DF, "sup_DF_inv": jr.sup_DF_inv,
            "empirical_L": L, "empirical_l": ell, "theorem_bound_margins": margins,
            "grid_spec": (grid or GridSpec.default(getattr(F, "has_inner", True),
                                                   getattr(F, "has_outer", True))).to_json(),
            "witnesses": {"DF": [jr.witness_DF.real, jr.witness_DF.imag],
                          "DF_inv": [jr.witness_DF_inv.real, jr.witness_DF_inv.imag]},
            "min_det": jr.min_det, "injective": jr.injective,
            "symmetry_defect": jr.symmetry_defect, "regions": jr.regions}
