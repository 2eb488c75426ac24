import xml.etree.ElementTree as ET

import numpy as np
import pytest

from schoenflies.curves import bowtie, circle
from schoenflies.extend import extend_plane_symmetric
from schoenflies.render import (MARGIN, UNIT, Panel, curve_panel, default_labels,
                                grid_image_figure, svg_document, symmetrization_figure)
from schoenflies.symmetrize import symmetrize

NS = "{http://www.w3.org/2000/svg}"


def parse(svg):
    return ET.fromstring(svg)


def points_of(el):
    return np.array([[float(a) for a in p.split(",")] for p in el.get("points").split()])


@pytest.fixture(scope="module")
def figure_one():
    f = circle(0.9, 1, 128)
    return f, symmetrization_figure(f, symmetrize(f, 0.0).g, default_labels(f))


def test_figure_is_deterministic_svg(figure_one):
    f, svg = figure_one
    again = symmetrization_figure(f, symmetrize(f, 0.0).g, default_labels(f))
    assert svg == again
    root = parse(svg)
    assert root.tag == NS + "svg"
    assert len(root.findall(NS + "g")) == 2


def test_labels_before_and_after(figure_one):
    _, svg = figure_one
    root = parse(svg)
    before, after = root.findall(NS + "g")
    texts = lambda g: {t.text for t in g.findall(NS + "text")}
    assert {"a", "b", "A", "B", "before"} <= texts(before)
    assert {"A1", "A2", "B1", "B2", "after"} <= texts(after)


def test_viewport_scaling_rule():
    p = Panel("square")
    p.add_path(np.array([0, 1, 1 + 0.5j, 0.5j]))
    svg = svg_document([p])
    root = parse(svg)
    assert float(root.get("width")) == pytest.approx(1 * UNIT + 2 * MARGIN)
    assert float(root.get("height")) == pytest.approx(0.5 * UNIT + 2 * MARGIN)
    pts = points_of(root.find(f"{NS}g/{NS}polygon"))
    # the bounding box sits MARGIN pixels inside the panel, y axis pointing down
    assert pts[:, 0].min() == pytest.approx(MARGIN) and pts[:, 1].min() == pytest.approx(MARGIN)
    assert pts[2, 1] == pytest.approx(MARGIN)


def test_identity_grid_is_undistorted():
    F = extend_plane_symmetric(circle(0, 1, 64))
    root = parse(grid_image_figure(F, n_r=4, n_theta=8))
    src, img = root.findall(NS + "g")
    a = [points_of(e) for e in src if e.get("points") is not None][:-1]
    b = [points_of(e) for e in img if e.get("points") is not None][:-1]
    assert len(a) == len(b) == 3 + 8       # radius 1 is skipped
    offset = b[0][0, 0] - a[0][0, 0]
    for p, q in zip(a, b):
        np.testing.assert_allclose(q - [offset, 0], p, atol=2e-3)


def test_bowtie_labels_sit_at_the_waist():
    f = bowtie(0.1, 256)
    (ta, la), (tb, lb) = default_labels(f)
    assert (la, lb) == ("A", "B")
    a, b = f(np.array([ta, tb]))
    assert a == pytest.approx(0.05j, abs=1e-12) and b == pytest.approx(-0.05j, abs=1e-12)


def test_curve_panel_without_domain():
    p = curve_panel(circle(0, 1, 16), "c", [(0.0, "P")], domain=False)
    assert len(p.paths) == 1 and [m[1] for m in p.marks] == ["P"]
