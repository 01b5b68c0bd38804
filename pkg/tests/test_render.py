import xml.etree.ElementTree as ET

import pytest

from conftest import make_drawing
from plyforge.exceptions import ValidationError
from plyforge.layouts.logply import assemble_heavy_path_drawing
from plyforge.render import RenderOptions, render_svg
from plyforge.trees import complete_kary

NS = {'svg': 'http://www.w3.org/2000/svg'}


def _parse(svg):
    return ET.fromstring(svg.encode())


def test_one_circle_per_disk(unit_star):
    root = _parse(render_svg(unit_star))
    assert len(root.findall('.//svg:circle', NS)) == 4
    assert len(root.findall('.//svg:line', NS)) == 3
    assert len(root.findall(".//svg:g[@id='vertices']/svg:path", NS)) == 4


def test_no_edges_means_no_circles():
    d = make_drawing([(0.0, 0.0), (1.0, 1.0)], [])
    root = _parse(render_svg(d))
    assert root.findall('.//svg:circle', NS) == []
    assert len(root.findall('.//svg:path', NS)) == 2


def test_hidden_layers(single_edge):
    opts = RenderOptions(show_ply_disks=False, show_edges=False)
    root = _parse(render_svg(single_edge, opts))
    assert root.findall('.//svg:circle', NS) == []
    assert root.findall('.//svg:line', NS) == []


def test_canvas_size_sets_the_longer_side(single_edge):
    root = _parse(render_svg(single_edge, RenderOptions(canvas_size=400)))
    assert float(root.get('width')) == pytest.approx(400, abs=1e-3)
    assert float(root.get('height')) < 400


def test_heavy_path_drawing_renders_finite_numbers():
    d = assemble_heavy_path_drawing(complete_kary(3, 3))
    svg = render_svg(d)
    assert 'nan' not in svg.lower()
    assert 'inf' not in svg.lower()
    assert len(_parse(svg).findall('.//svg:circle', NS)) == 40


def test_overlaps_are_highlighted():
    d = make_drawing([(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)], [(0, 1), (1, 2)])
    root = _parse(render_svg(d, RenderOptions(highlight_overlaps=True)))
    assert root.findall(".//svg:g[@id='overlaps']/svg:rect", NS)


def test_tangent_disks_have_no_overlap(single_edge):
    root = _parse(render_svg(
        single_edge, RenderOptions(highlight_overlaps=True)
    ))
    assert root.find(".//svg:g[@id='overlaps']", NS) is None


@pytest.mark.parametrize('kwargs, field', [
    ({'canvas_size': 0}, 'canvas_size'),
    ({'stroke_width': -1}, 'stroke_width'),
    ({'overlap_resolution': 0}, 'overlap_resolution'),
])
def test_options_validation(kwargs, field):
    with pytest.raises(ValidationError, match=field):
        RenderOptions(**kwargs)
