"""Default curve corpus and the runner that extends each curve and reports on it."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .curves import CircleEmbedding, embedding_constants, make_embedding
from .extend import (GLOBAL_BOUNDS, INTERIOR_BOUNDS, GridSpec, JacobianReport, PlaneExtension,
                     extend_plane_symmetric, extension_report, jacobian_report)
from .symmetrize import (WindingSymmetrization, desymmetrize_extension, symmetrization_report,
                         symmetrize_recentred)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    spec: dict
    n: int
    pipeline: str = "symmetric"     # or "general": symmetrize, extend, descend

    def curve(self) -> CircleEmbedding:
        return make_embedding(self.spec, self.n)


DEFAULT_CORPUS = (
    CorpusEntry("identity", {"family": "circle"}, 64),
    CorpusEntry("circle_R0.5", {"family": "circle", "params": {"R": 0.5}}, 64),
    CorpusEntry("circle_R2.5", {"family": "circle", "params": {"R": 2.5}}, 64),
    CorpusEntry("ellipse_2_1", {"family": "ellipse", "params": {"a": 2.0, "b": 1.0}}, 256),
    CorpusEntry("trig_4_2", {"family": "trig", "params": {"amp_r": 0.1, "k_r": 4,
                                                           "amp_t": 0.1, "k_t": 2}}, 256),
    CorpusEntry("trig_6_4", {"family": "trig", "params": {"amp_r": 0.15, "k_r": 6,
                                                           "amp_t": 0.05, "k_t": 4}}, 256),
    CorpusEntry("circle_shift_0.9", {"family": "circle", "params": {"c": [0.9, 0.0]}}, 128,
                "general"),
    CorpusEntry("bowtie_0.1", {"family": "bowtie", "params": {"eps": 0.1}}, 256, "general"),
)


def corpus_by_name(names=None) -> list[CorpusEntry]:
    if not names:
        return list(DEFAULT_CORPUS)
    table = {e.name: e for e in DEFAULT_CORPUS}
    missing = [n for n in names if n not in table]
    if missing:
        raise KeyError(f"unknown corpus entries: {missing}")
    return [table[n] for n in names]


@dataclass
class CorpusResult:
    entry: CorpusEntry
    curve: CircleEmbedding
    F: object                       # PlaneExtension or DesymmetrizedExtension
    symmetric_part: PlaneExtension  # F itself, or G for the general pipeline
    report: dict
    jacobian: JacobianReport
    sym: WindingSymmetrization | None
    seconds: float                  # wall time; kept out of the JSON report


def inner_margins(regions, L: float, ell: float) -> dict:
    """Disk-only bounds from the inner grid regions of a symmetric extension."""
    inner = [r for r in regions if r["r_hi"] <= 1]
    if not inner:
        return {}
    up = max(r["sup_DF"] for r in inner)
    inv = max(r["sup_DF_inv"] for r in inner)
    return {"interior_DF": INTERIOR_BOUNDS[0] * L - up,
            "interior_DF_inv": INTERIOR_BOUNDS[1] / ell - inv}


def run_entry(entry: CorpusEntry, grid: GridSpec | None = None, resolution: int | None = None,
              keep_samples: bool = False) -> CorpusResult:
    t0 = time.perf_counter()
    f = entry.curve()
    sym = None
    if entry.pipeline == "general":
        sym = symmetrize_recentred(f)
        G = extend_plane_symmetric(sym.g, resolution)
        F = desymmetrize_extension(G, sym.w0, f)
        jr = jacobian_report(F, grid, keep_samples=keep_samples)
        rep = extension_report(F, grid, kind="general", constants=embedding_constants(f),
                               jacobian=jr)
        rep["symmetrization"] = symmetrization_report(sym)
        rep["branch_defect"] = F.branch_defect()
        # the symmetric factor must meet the symmetric-curve bounds for g's constants
        cg = embedding_constants(sym.g, refine=1)
        gr = extension_report(G, grid, kind="global", constants=cg)
        rep["symmetric_factor"] = {
            "boundary_agreement": gr["boundary_agreement"],
            "theorem_bound_margins": {**gr["theorem_bound_margins"],
                                      **inner_margins(gr["regions"], cg.upper_L, cg.lower_l)},
            "sup_DF": gr["sup_DF"], "sup_DF_inv": gr["sup_DF_inv"],
        }
        part = G
    elif entry.pipeline == "symmetric":
        F = extend_plane_symmetric(f, resolution)
        jr = jacobian_report(F, grid, keep_samples=keep_samples)
        cf = embedding_constants(f)
        rep = extension_report(F, grid, kind="global", constants=cf, jacobian=jr)
        rep["theorem_bound_margins"].update(inner_margins(rep["regions"], cf.upper_L, cf.lower_l))
        part = F
    else:
        raise ValueError(f"unknown pipeline {entry.pipeline!r}")
    rep["entry"] = entry.name
    rep["pipeline"] = entry.pipeline
    return CorpusResult(entry, f, F, part, rep, jr, sym, time.perf_counter() - t0)


def run_corpus(entries=None, grid: GridSpec | None = None, **kw) -> list[CorpusResult]:
    return [run_entry(e, grid, **kw) for e in (entries or DEFAULT_CORPUS)]


def prepared_curve(ext: PlaneExtension) -> CircleEmbedding:
    """The counterclockwise curve the conformal maps of ``ext`` were built for."""
    if not ext.flip:
        return ext.curve
    c = ext.curve
    return CircleEmbedding(c.t, np.conj(c.values), symmetric=c.symmetric, name=c.name, check=False)
