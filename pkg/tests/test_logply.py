import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_drawing
from plyforge.drawings import Point
from plyforge.exceptions import PrecisionError, ValidationError
from plyforge.layouts.logply import (LayerSchedule, area_growth, area_stats,
                                     assemble_heavy_path_drawing, draw_path,
                                     heavy_path_layout, layer_count,
                                     layered_star_layout,
                                     layered_tree_layout)
from plyforge.ply import PlyDisk, arrangement_ply, ply_disks, ply_number_exact
from plyforge.trees import complete_kary, path_tree, random_tree, star
from strategies import random_trees

sizes = st.lists(
    st.integers(min_value=0, max_value=50), min_size=1, max_size=12
)


# region layered
def test_consecutive_layers_only_touch():
    # leaf children on one ray, one layer apart
    disks = [PlyDisk(0, Point(1.0, 0), 0.5), PlyDisk(1, Point(3.0, 0), 1.5)]
    result = arrangement_ply(disks)
    assert result.ply == 1
    assert result.closed_ply == 2


def test_eighteen_children_use_three_layers():
    points = layered_star_layout(Point(0, 0), 1.0, 18)
    radii = sorted({round(math.hypot(p.x, p.y), 9) for p in points})
    assert radii == [1.0, 3.0, 9.0]
    assert layer_count(18) == 3


def test_six_children_one_layer():
    points = layered_star_layout(Point(0, 0), 2.0, 6)
    angles = sorted(
        round(math.degrees(math.atan2(p.y, p.x))) % 360 for p in points
    )
    assert angles == [0, 60, 120, 180, 240, 300]
    d = make_drawing(
        [(0.0, 0.0)] + [p.as_tuple() for p in points],
        [(0, k) for k in range(1, 7)]
    )
    child_disks = ply_disks(d)[1:]
    assert arrangement_ply(child_disks).ply == 1


def test_layered_star_validation():
    with pytest.raises(ValidationError, match='child_count'):
        layered_star_layout(Point(0, 0), 1.0, 0)


@settings(max_examples=100, deadline=None)
@given(
    st.integers(min_value=1, max_value=40),
    st.floats(min_value=0.01, max_value=100.0),
    st.floats(min_value=0.0, max_value=2 * math.pi),
    st.floats(min_value=-100.0, max_value=100.0),
    st.floats(min_value=-100.0, max_value=100.0)
)
def test_distinct_layers_never_overlap(count, base, phase, cx, cy):
    points = layered_star_layout(Point(cx, cy), base, count, phase)
    d = make_drawing(
        [(cx, cy)] + [p.as_tuple() for p in points],
        [(0, k) for k in range(1, count + 1)]
    )
    disks = ply_disks(d)[1:]
    for a in range(count):
        for b in range(a + 1, count):
            if a // 6 == b // 6:
                continue
            gap = disks[a].center.distance_to(disks[b].center)
            assert gap >= (disks[a].radius + disks[b].radius) * (1 - 1e-9)


@pytest.mark.parametrize('k, height', [(2, 5), (3, 3), (7, 2), (13, 1)])
def test_layered_tree_ply_is_at_most_height_plus_one(k, height):
    tree = complete_kary(k, height)
    d = layered_tree_layout(tree)
    assert d.alpha == 0.5
    assert ply_number_exact(d).ply <= height + 1


def test_layered_area_ratio_bound():
    tree = complete_kary(8, 2)
    ratio, _ = area_stats(layered_tree_layout(tree))
    assert ratio <= 3 ** (layer_count(8) * (tree.height + 1))
# endregion
...


# region draw path
def test_draw_path_example():
    layout = draw_path([4, 1, 2], anchored_total=10)
    assert layout.edge_lengths == (4.0, 5.0, 3.0)
    assert layout.is_two_drawing()
    assert layout.total_length == 12 <= 6 * 10


def test_draw_path_degenerate():
    assert draw_path([0]).edge_lengths == (1.0,)


def test_draw_path_equal_sizes():
    layout = draw_path([3, 3, 3, 3])
    assert layout.edge_lengths == (3.0, 6.0, 6.0, 6.0)


def test_draw_path_errors():
    with pytest.raises(ValidationError, match='empty'):
        draw_path([])
    with pytest.raises(ValidationError, match='anchored_total'):
        draw_path([1, 2], anchored_total=3)
    with pytest.raises(ValidationError, match='subtree_sizes'):
        draw_path([1, -2])


@settings(max_examples=100, deadline=None)
@given(sizes)
def test_draw_path_invariants(ns):
    layout = draw_path(ns)
    lengths = layout.edge_lengths
    assert layout.is_two_drawing()
    assert lengths[0] >= max(ns[0], 1)
    for i in range(len(ns) - 1):
        assert lengths[i + 1] >= ns[i] + ns[i + 1]
    assert layout.total_length <= 6 * (sum(ns) + len(ns))


@settings(max_examples=100, deadline=None)
@given(sizes)
def test_two_drawings_have_ply_at_most_two(ns):
    layout = draw_path(ns)
    xs = np.concatenate([[0.0], np.cumsum(layout.edge_lengths)])
    d = make_drawing(
        [(float(x), 0.0) for x in xs],
        [(i, i + 1) for i in range(len(xs) - 1)]
    )
    assert ply_number_exact(d).ply <= 2
# endregion
...


# region layer schedules
def test_schedule_recurrence_and_closed_form():
    schedule = LayerSchedule.from_anchored_total(5, 4)
    assert schedule.layer_offsets == tuple(
        LayerSchedule.closed_form(5, j) for j in range(1, 5)
    )
    assert schedule.is_separated()


def test_schedule_extent():
    n, delta = 7, 5
    schedule = LayerSchedule.from_anchored_total(n, delta - 1)
    # the last layer ends exactly 3n beyond 3^delta n
    assert schedule.outer_extent == 3 ** delta * n + 3 * n


def test_schedule_validation():
    with pytest.raises(ValidationError):
        LayerSchedule.from_anchored_total(3, 0)
# endregion
...


# region heavy path
def test_path_graph_is_a_straight_segment():
    d = assemble_heavy_path_drawing(path_tree(9))
    assert np.all(d.coordinates[:, 1] == 0)
    assert ply_number_exact(d).ply <= 2


def test_star_with_seven_children():
    layout = heavy_path_layout(star(7))
    assert layout.decomposition.paths[0] == (0, 1)
    assert len(layout.schedules[0].layer_offsets) == 6
    assert ply_number_exact(layout.drawing).ply <= 3


def test_single_vertex_tree():
    d = assemble_heavy_path_drawing(path_tree(1))
    assert list(d.positions) == [0]


@settings(max_examples=30, deadline=None)
@given(random_trees(max_n=80, min_delta=2, max_delta=7))
def test_heavy_path_structure(tree):
    layout = heavy_path_layout(tree)
    d = layout.drawing
    p = d.positions
    disks = {disk.vertex: disk for disk in ply_disks(d)}
    hpd = layout.decomposition

    for path_layout in layout.paths:
        assert path_layout.is_two_drawing()
        scale = path_layout.scale
        radii = [r * scale for r in path_layout.drawing_disk_radius]
        path = path_layout.path
        for i in range(len(path) - 1):
            gap = p[path[i]].distance_to(p[path[i + 1]])
            assert gap >= (radii[i] + radii[i + 1]) * (1 - 1e-9)
        for i, v in enumerate(path):
            for q in hpd.anchored_paths(v):
                for u in tree.descendants(hpd.paths[q][0]):
                    reach = p[v].distance_to(p[u]) + disks[u].radius
                    assert reach <= radii[i] * (1 + 1e-9)

    for schedule in layout.schedules.values():
        assert schedule.is_separated()


@settings(max_examples=20, deadline=None)
@given(random_trees(max_n=60, min_delta=2, max_delta=6))
def test_heavy_path_ply_bound(tree):
    layout = heavy_path_layout(tree)
    if tree.n > 1:
        assert ply_number_exact(layout.drawing).ply <= layout.ply_bound


@pytest.mark.parametrize('height', [
    5, 6,
    *[pytest.param(h, marks=pytest.mark.slow) for h in range(7, 12)]
])
def test_complete_binary_tree_ply_bound(height):
    tree = complete_kary(2, height)
    layout = heavy_path_layout(tree)
    assert tree.n == 2 ** (height + 1) - 1
    ply = ply_number_exact(layout.drawing).ply
    assert ply <= layout.ply_bound
    assert ply <= 3 * (math.log2(tree.n) + 1)


@pytest.mark.slow
def test_large_random_tree_stays_in_range():
    tree = random_tree(4095, 3, seed=1)
    layout = heavy_path_layout(tree)
    ratio, area = area_stats(layout.drawing)
    assert math.isfinite(area)
    assert math.isfinite(ratio)
    assert ply_number_exact(layout.drawing).ply <= layout.ply_bound
# endregion
...


# region worst-case scaling
SMALL_TREES = [
    path_tree(6), star(5), star(7),
    complete_kary(2, 3), complete_kary(2, 4), complete_kary(3, 2),
    random_tree(20, 3, seed=0), random_tree(20, 3, seed=1),
    random_tree(16, 4, seed=2)
]


@pytest.mark.parametrize('tree', SMALL_TREES)
def test_worst_case_scaling_ply_bound(tree):
    layout = heavy_path_layout(tree, scaling='worst_case')
    assert layout.scaling == 'worst_case'
    assert layout.drawing.meta['scaling'] == 'worst_case'
    assert ply_number_exact(layout.drawing).ply <= layout.ply_bound


@pytest.mark.parametrize('tree', SMALL_TREES)
def test_worst_case_scaling_follows_the_schedule(tree):
    layout = heavy_path_layout(tree, scaling='worst_case')
    hpd = layout.decomposition
    H = hpd.total_height
    p = layout.drawing.positions
    for path_layout in layout.paths:
        assert path_layout.scale == 3.0 ** (
            tree.max_degree * (H - path_layout.height)
        )
    for v, schedule in layout.schedules.items():
        assert schedule == layout.worst_case_schedule(v)
        for j, q in enumerate(hpd.anchored_paths(v)):
            first = hpd.paths[q][0]
            expected = LayerSchedule.closed_form(
                hpd.anchored_subtree_size[v], j + 1
            ) * layout.paths[q].scale
            assert p[v].distance_to(p[first]) == pytest.approx(expected)


def test_worst_case_scaling_uses_integer_sizes():
    layout = heavy_path_layout(complete_kary(2, 2), scaling='worst_case')
    assert layout.decomposition.paths[0] == (0, 1, 3)
    root_path = layout.paths[0]
    assert root_path.drawing_disk_radius == (3.0, 1.0, 0.0)
    assert root_path.edge_lengths == (3.0, 4.0, 2.0)
    assert root_path.scale == 3.0 ** 6


def test_deep_worst_case_scaling_overflows():
    with pytest.raises(PrecisionError):
        heavy_path_layout(star(700), scaling='worst_case')


def test_unknown_scaling():
    with pytest.raises(ValidationError, match='scaling'):
        heavy_path_layout(path_tree(3), scaling='doubled')


def test_layout_json_reports_worst_case_schedule():
    data = heavy_path_layout(star(7)).to_json()
    assert data['scaling'] == 'measured'
    assert data['ply_bound'] == 6
    [entry] = data['schedules']
    assert entry['vertex'] == 0
    assert entry['anchored_total'] == 6
    assert len(entry['layer_offsets']) == 6
    assert entry['worst_case_offsets'] == [
        LayerSchedule.closed_form(6, j) for j in range(1, 7)
    ]
...


def test_area_stats_single_edge(single_edge):
    stats = area_stats(single_edge)
    assert stats.edge_ratio == 1.0


@pytest.mark.slow
def test_area_growth_is_polynomial():
    df = area_growth([2 ** k for k in range(6, 13)], delta=3, seed=5)
    assert list(df.columns) == ['n', 'H', 'ply_bound', 'area', 'ratio']
    assert len(df) == 7
    assert 0 < df.attrs['slope'] < 20
    half = len(df) // 2 + 1
    logs = np.log(df[['n', 'area']].to_numpy(dtype=float))
    early, _ = np.polyfit(logs[:half, 0], logs[:half, 1], 1)
    late, _ = np.polyfit(logs[-half:, 0], logs[-half:, 1], 1)
    assert late < 2 * early
