"""Batch command line: extend | symmetrize | harmonic | verify | render.

Every command writes JSON/CSV/SVG files into the output directory and exits with
0 (all checks pass), 2 (an inequality is violated), 3 (bad input) or 4 (numerical
failure).  Errors are also written as ``error.json``.
"""
from __future__ import annotations

import argparse
import csv
import glob
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import render
from .ba_ext import InverseError, LiftError
from .conformal import ConformalMapError
from .corpus import DEFAULT_CORPUS, CorpusEntry, run_entry
from .curves import CircleEmbedding, CurveError, make_embedding, winding_number
from .extend import GridSpec, OrientationFold
from .harmonic import hm_disk_exact, hm_monte_carlo, Arc
from .symmetrize import (BranchError, symmetrization_report, symmetrize, symmetrize_recentred)
from . import verify as V

OUT_ENV = "SCHOENFLIES_OUT"
EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3, 4
COMMANDS = ("extend", "symmetrize", "harmonic", "verify", "render")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    out: Path = Path("out")
    seed: int = 0
    n: int | None = None
    walks: int = 100_000
    grid: tuple = (64, 256)
    fault: str | None = None


# --- serialization -----------------------------------------------------------------

def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, complex):
        return [_clean(x.real), _clean(x.imag)]
    return x


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) for v in r])


# --- inputs ----------------------------------------------------------------------------

def parse_grid(s: str) -> tuple[int, int]:
    try:
        a, b = s.lower().split("x")
        n_r, n_t = int(a), int(b)
    except ValueError:
        raise InputError(f"grid spec must look like 64x256, got {s!r}") from None
    if n_r < 2 or n_t < 4:
        raise InputError("grid needs at least 2 radii and 4 angles")
    return n_r, n_t


def expand_inputs(patterns) -> list[Path]:
    out = []
    for p in patterns:
        hits = sorted(glob.glob(p))
        if not hits:
            raise InputError(f"no input matches {p!r}")
        out += [Path(h) for h in hits]
    return out


def load_spec(path: Path) -> dict:
    try:
        spec = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"input not found: {path}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e})") from None
    if not isinstance(spec, dict):
        raise InputError(f"{path}: expected a JSON object")
    return spec


def load_curve(spec: dict, n: int | None) -> CircleEmbedding:
    return make_embedding(spec, n)


def _entries(cfg: RunConfig):
    """(name, spec) for each input, or the default corpus when there is none."""
    if not cfg.inputs:
        return [(e.name, {**e.spec, "n": e.n, "pipeline": e.pipeline}) for e in DEFAULT_CORPUS]
    return [(p.stem, load_spec(p)) for p in cfg.inputs]


def _target_dir(cfg: RunConfig, name: str, many: bool) -> Path:
    return cfg.out / name if many else cfg.out


# --- commands -----------------------------------------------------------------------------

def cmd_extend(cfg: RunConfig) -> int:
    items = _entries(cfg)
    many = len(items) > 1
    grid_rc = cfg.grid
    status = EXIT_OK
    for name, spec in items:
        f = load_curve(spec, cfg.n)
        pipeline = spec.get("pipeline") or ("symmetric" if f.symmetric else "general")
        entry = CorpusEntry(name, spec, cfg.n or spec.get("n", f.n), pipeline)
        grid = GridSpec.default(n_r=grid_rc[0], n_theta=grid_rc[1])
        res = run_entry(entry, grid, keep_samples=True)
        d = _target_dir(cfg, name, many)
        rep = res.report
        write_json(d / "extension_report.json", rep)
        s = res.jacobian.samples
        write_csv(d / "jacobian_grid.csv", ["x", "y", "norm_DF", "norm_DF_inv", "det"],
                  zip(s["x"], s["y"], s["norm_DF"], s["norm_DF_inv"], s["det"]))
        (d / "image_grid.svg").write_text(render.grid_image_figure(res.F, title=name))
        margins = dict(rep["theorem_bound_margins"])
        margins.update(rep.get("symmetric_factor", {}).get("theorem_bound_margins", {}))
        if min(margins.values()) < 0 or rep["boundary_agreement_rel"] > 1e-3:
            status = EXIT_VIOLATION
    return status


def _symmetrize(f: CircleEmbedding, spec: dict):
    if "w0" in spec:
        w0 = complex(*spec["w0"]) if isinstance(spec["w0"], list) else complex(spec["w0"])
        return symmetrize(f, w0), False
    return symmetrize_recentred(f), True


def cmd_symmetrize(cfg: RunConfig) -> int:
    items = _entries(cfg)
    many = len(items) > 1
    status = EXIT_OK
    for name, spec in items:
        f = load_curve(spec, cfg.n)
        sym, recentred = _symmetrize(f, spec)
        rep = symmetrization_report(sym, recentred=recentred)
        d = _target_dir(cfg, name, many)
        write_json(d / "symmetrization_report.json", rep)
        write_json(d / "symmetrized_curve.json", sym.g.to_json())
        margins = list(rep["prop84_margins"].values()) + list(rep.get("cor85_margins", {}).values())
        if min(margins) < 0:
            status = EXIT_VIOLATION
    return status


def cmd_harmonic(cfg: RunConfig) -> int:
    """Harmonic measure of a parameter arc seen from a point (input), or the arc and
    projection-theorem suites (no input)."""
    if not cfg.inputs:
        checks = V.lowerharm_checks(200, cfg.seed)
        checks += V.bn_checks(V.bn_configurations(50, cfg.seed), cfg.walks, cfg.seed)
        table = V.summarize(checks)
        write_json(cfg.out / "harmonic_report.json",
                   {"seed": cfg.seed, "walks": cfg.walks, "inequalities": table})
        return EXIT_OK if all(v["pass"] for v in table.values()) else EXIT_VIOLATION
    many = len(cfg.inputs) > 1
    for p in cfg.inputs:
        spec = load_spec(p)
        f = load_curve(spec, cfg.n)
        try:
            z = complex(*spec["z"])
            lo, hi = spec["arc"]
        except (KeyError, TypeError, ValueError):
            raise InputError(f"{p}: harmonic input needs \"z\": [x, y] and \"arc\": [t_lo, t_hi]") from None
        t = f.t
        mid = np.append(t[1:], t[0] + 2 * np.pi)
        mid = 0.5 * (t + mid)
        mask = ((mid - lo) % (2 * np.pi)) <= (hi - lo)
        res = hm_monte_carlo(f.values, mask, z, cfg.walks, cfg.seed)
        out = {"curve": f.name, "z": z, "arc": [lo, hi], "monte_carlo": res.__dict__}
        if np.allclose(np.abs(f.values), 1.0, atol=1e-12) and abs(z) < 1:
            out["exact"] = hm_disk_exact(z, Arc(lo, hi)).value
        write_json(_target_dir(cfg, p.stem, many) / "harmonic_report.json", out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    kernel = V.corrupted_kernel if cfg.fault == "poisson-kernel" else V.poisson_kernel
    corpus = DEFAULT_CORPUS
    if cfg.inputs:
        corpus = tuple(CorpusEntry(p.stem, s, cfg.n or s.get("n", 256),
                                   s.get("pipeline") or "general")
                       for p, s in ((p, load_spec(p)) for p in cfg.inputs))
        corpus = tuple(e if not load_curve(e.spec, e.n).symmetric
                       else CorpusEntry(e.name, e.spec, e.n, e.spec.get("pipeline", "symmetric"))
                       for e in corpus)
    vc = V.VerifyConfig(seed=cfg.seed, walks=cfg.walks, corpus=corpus, kernel=kernel)
    rep = V.run_verify(vc)
    rep["fault"] = cfg.fault
    write_json(cfg.out / "verify_report.json", rep)
    return EXIT_OK if rep["pass"] else EXIT_VIOLATION


def cmd_render(cfg: RunConfig) -> int:
    items = _entries(cfg)
    many = len(items) > 1
    n_r, n_t = cfg.grid
    for name, spec in items:
        f = load_curve(spec, cfg.n)
        if "w0" not in spec and abs(winding_number(f, 0.0)) == 1:
            spec = {**spec, "w0": [0.0, 0.0]}
        sym, _ = _symmetrize(f, spec)
        labels = [(float(t), str(s)) for t, s in spec.get("labels", [])] or render.default_labels(f)
        d = _target_dir(cfg, name, many)
        d.mkdir(parents=True, exist_ok=True)
        (d / "before_after.svg").write_text(render.symmetrization_figure(f, sym.g, labels))
        pipeline = spec.get("pipeline") or ("symmetric" if f.symmetric else "general")
        entry = CorpusEntry(name, spec, cfg.n or spec.get("n", f.n), pipeline)
        res = run_entry(entry, GridSpec.default(n_r=8, n_theta=32))
        (d / "image_grid.svg").write_text(
            render.grid_image_figure(res.F, n_r=min(n_r, 16), n_theta=min(n_t, 32), title=name))
    return EXIT_OK


HANDLERS = {"extend": cmd_extend, "symmetrize": cmd_symmetrize, "harmonic": cmd_harmonic,
            "verify": cmd_verify, "render": cmd_render}

NUMERIC_ERRORS = (ConformalMapError, InverseError, OrientationFold, BranchError, LiftError,
                  FloatingPointError, np.linalg.LinAlgError)
INPUT_ERRORS = (InputError, CurveError, KeyError, FileNotFoundError)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schoenflies",
                                 description="Bi-Lipschitz extension of circle embeddings.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", action="append", default=[],
                    help="curve JSON file or glob (repeatable); default: built-in corpus")
    ap.add_argument("--out", default=None,
                    help=f"output directory (default: ${OUT_ENV} or ./out)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, default=None, help="samples for named curve families")
    ap.add_argument("--walks", type=int, default=100_000, help="Monte Carlo walks per estimate")
    ap.add_argument("--grid", default="64x256", help="polar grid as N_RADIIxN_ANGLES")
    ap.add_argument("--fault", default=None, choices=["poisson-kernel"], help=argparse.SUPPRESS)
    return ap


def make_config(args) -> RunConfig:
    out = Path(args.out or os.environ.get(OUT_ENV) or "out")
    if args.walks < 1000:
        raise InputError("--walks must be at least 1000")
    return RunConfig(args.command, expand_inputs(args.input), out, args.seed, args.n,
                     args.walks, parse_grid(args.grid), args.fault)


def _fail(out: Path | None, code: int, exc: Exception) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if out is not None:
        try:
            write_json(out / "error.json", payload)
        except OSError:
            pass
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out or os.environ.get(OUT_ENV) or "out")
    try:
        cfg = make_config(args)
        cfg.out.mkdir(parents=True, exist_ok=True)
        return HANDLERS[cfg.command](cfg)
    except INPUT_ERRORS as e:
        return _fail(out, EXIT_INPUT, e)
    except NUMERIC_ERRORS as e:
        return _fail(out, EXIT_NUMERIC, e)
    except ValueError as e:
        return _fail(out, EXIT_INPUT, e)
    except RuntimeError as e:
        return _fail(out, EXIT_NUMERIC, e)


if __name__ == "__main__":
    sys.exit(main())
