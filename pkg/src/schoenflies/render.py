"""Plain-text SVG figures: curves before/after symmetrization and images of polar grids.

Scaling rule: one unit of length is 200 px, each panel is centred on the bounding
box of its content plus a fixed margin.  Coordinates are written with three
decimals so identical inputs give identical bytes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import CircleEmbedding

UNIT = 200.0
MARGIN = 40.0
TWO_PI = 2.0 * np.pi


def _f(x: float) -> str:
    s = f"{x:.3f}"
    return "0.000" if s == "-0.000" else s


@dataclass
class Panel:
    title: str
    paths: list = field(default_factory=list)     # (points, closed, style)
    marks: list = field(default_factory=list)     # (point, label)

    def add_path(self, pts, closed=True, style="curve"):
        self.paths.append((np.asarray(pts, dtype=complex), closed, style))

    def add_mark(self, p, label):
        self.marks.append((complex(p), label))

    def bbox(self):
        pts = [p for p, _, _ in self.paths] + [np.array([m for m, _ in self.marks])]
        a = np.concatenate([np.atleast_1d(p) for p in pts if np.size(p)])
        a = a[np.isfinite(a)]
        return a.real.min(), a.real.max(), a.imag.min(), a.imag.max()


STYLES = {
    "curve": 'fill="none" stroke="#1f3a93" stroke-width="1.5"',
    "domain": 'fill="none" stroke="#888888" stroke-width="1" stroke-dasharray="4 3"',
    "grid": 'fill="none" stroke="#444444" stroke-width="0.6"',
}


def _panel_svg(p: Panel, x0: float):
    xmin, xmax, ymin, ymax = p.bbox()
    w = (xmax - xmin) * UNIT + 2 * MARGIN
    h = (ymax - ymin) * UNIT + 2 * MARGIN
    cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)

    def tx(z):
        z = np.asarray(z, dtype=complex)
        return x0 + w / 2 + (z.real - cx) * UNIT, h / 2 - (z.imag - cy) * UNIT

    out = [f'<g id="{p.title}">',
           f'<text x="{_f(x0 + w / 2)}" y="{_f(18.0)}" text-anchor="middle" '
           f'font-family="sans-serif" font-size="14">{p.title}</text>']
    for pts, closed, style in p.paths:
        X, Y = tx(pts)
        d = " ".join(f"{_f(a)},{_f(b)}" for a, b in zip(X, Y))
        tag = "polygon" if closed else "polyline"
        out.append(f'<{tag} points="{d}" {STYLES[style]}/>')
    for z, label in p.marks:
        X, Y = tx(z)
        out.append(f'<circle cx="{_f(float(X))}" cy="{_f(float(Y))}" r="3" fill="#c0392b"/>')
        out.append(f'<text x="{_f(float(X) + 6)}" y="{_f(float(Y) - 6)}" font-family="serif" '
                   f'font-style="italic" font-size="14">{label}</text>')
    out.append("</g>")
    return "\n".join(out), w, h


def svg_document(panels) -> str:
    parts, x0, height = [], 0.0, 0.0
    for p in panels:
        s, w, h = _panel_svg(p, x0)
        parts.append(s)
        x0 += w
        height = max(height, h)
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(x0)}" height="{_f(height)}" '
            f'viewBox="0 0 {_f(x0)} {_f(height)}">')
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *parts,
                      "</svg>"]) + "\n"


def curve_panel(curve: CircleEmbedding, title: str, labels=(), domain: bool = True) -> Panel:
    """The image curve with labelled points f(e^{it}); optionally the unit circle with
    the matching lower-case parameter points."""
    p = Panel(title)
    if domain:
        p.add_path(np.exp(1j * np.linspace(0, TWO_PI, 256, endpoint=False)), style="domain")
    p.add_path(curve.values)
    for t, name in labels:
        if domain:
            p.add_mark(np.exp(1j * t), name.lower())
        p.add_mark(complex(curve(np.array([t]))[0]), name.upper())
    return p


def symmetrization_figure(f: CircleEmbedding, g: CircleEmbedding, labels=()) -> str:
    """Two panels: f with labels (A, B, ...), and g with the two lifts (A1, A2, ...)."""
    lifted = []
    for t, name in labels:
        lifted += [(t / 2, name + "1"), (t / 2 + np.pi, name + "2")]
    return svg_document([curve_panel(f, "before", labels), curve_panel(g, "after", lifted)])


def grid_lines(n_r: int = 8, n_theta: int = 16, r_max: float = 2.0, m: int = 256):
    """Circles and rays of a polar grid, avoiding the unit circle and the origin."""
    radii = [r for r in np.linspace(r_max / n_r, r_max, n_r) if abs(r - 1) > 1e-9]
    circles = [r * np.exp(1j * np.linspace(0, TWO_PI, m, endpoint=False)) for r in radii]
    s = np.linspace(r_max / (4 * n_r), r_max, m)
    s = s[np.abs(s - 1) > 1e-6]
    rays = [s * np.exp(1j * th) for th in TWO_PI * np.arange(n_theta) / n_theta]
    return circles, rays


def grid_image_figure(F, n_r: int = 8, n_theta: int = 16, r_max: float = 2.0,
                      title: str = "image grid") -> str:
    """Images of polar grid lines under F, next to the grid itself."""
    circles, rays = grid_lines(n_r, n_theta, r_max)
    src, img = Panel("grid"), Panel(title)
    for c in circles:
        src.add_path(c, style="grid")
        img.add_path(F(c), style="grid")
    for r in rays:
        src.add_path(r, closed=False, style="grid")
        img.add_path(F(r), closed=False, style="grid")
    src.add_path(np.exp(1j * np.linspace(0, TWO_PI, 256, endpoint=False)), style="domain")
    img.add_path(F.curve.values)
    return svg_document([src, img])


def default_labels(curve: CircleEmbedding):
    """Named points for the known families: the bowtie waist, otherwise the two
    parameters +-pi/2."""
    name = curve.name or ""
    if name.startswith("bowtie("):
        eps = float(name[len("bowtie("):-1])
        return [(TWO_PI - eps / 2, "A"), (eps / 2, "B")]
    return [(np.pi / 2, "A"), (3 * np.pi / 2, "B")]
