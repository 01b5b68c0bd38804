import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plyforge.exceptions import ValidationError
from plyforge.layouts.oneply import (OnePlyParams, compute_alpha_max,
                                     compute_f, layout_one_ply,
                                     one_ply_params)
from plyforge.ply import ply_number_exact
from plyforge.trees import complete_kary, path_tree, random_tree


def _subtree_reach(tree, xy, w):
    return max(
        float(np.hypot(*(xy[u] - xy[w]))) for u in tree.descendants(w)
    )


def test_compute_f_examples():
    assert compute_f(3) == pytest.approx(0.4641016151377546, rel=1e-12)
    assert compute_f(6) == pytest.approx(1 / 3, rel=1e-12)
    assert compute_f(4, manhattan=True) == 0.5


def test_compute_f_rejects_small_delta():
    with pytest.raises(ValidationError, match='delta'):
        compute_f(2)
    with pytest.raises(ValidationError, match='manhattan'):
        compute_f(5, manhattan=True)


def test_alpha_max_examples():
    f = compute_f(3)
    assert compute_alpha_max(3) == pytest.approx(f / (1 + f), rel=1e-12)
    assert compute_alpha_max(3) == pytest.approx(0.317, abs=1e-3)
    assert compute_alpha_max(4, manhattan=True) == pytest.approx(1 / 3)


def test_alpha_max_decays_like_pi_over_delta():
    assert compute_alpha_max(1000) * 1000 == pytest.approx(math.pi, rel=0.02)


def test_params_validation():
    params = one_ply_params(5)
    assert params.theta == pytest.approx(2 * math.pi / 5)
    assert params.alpha == compute_alpha_max(5)
    with pytest.raises(ValidationError, match='alpha'):
        OnePlyParams(5, compute_f(5), 0.8)


def test_single_edge():
    d = layout_one_ply(path_tree(2), one_ply_params(3), root_edge_length=2.5)
    assert d.edge_lengths.tolist() == [2.5]
    assert ply_number_exact(d).ply == 1


def test_manhattan_ternary_tree_is_one_ply():
    tree = complete_kary(3, 4)
    d = layout_one_ply(tree, one_ply_params(4, manhattan=True))
    xy = d.coordinates
    for a, b in d.edges:
        dx, dy = xy[a] - xy[b]
        assert dx == 0 or dy == 0
    assert ply_number_exact(d).ply == 1


def test_manhattan_subtrees_stay_within_the_incoming_edge():
    tree = complete_kary(3, 5)
    d = layout_one_ply(tree, one_ply_params(4, manhattan=True))
    xy = d.coordinates
    for w in range(1, tree.n):
        incoming = 0.5 ** (tree.depths[w] - 1)
        reach = max(
            float(np.abs(xy[u] - xy[w]).sum()) for u in tree.descendants(w)
        )
        assert reach <= incoming * (1 + 1e-12)


def test_manhattan_bound_is_tight():
    tree = complete_kary(3, 5)
    below = one_ply_params(4, manhattan=True, alpha=(1 / 3) * (1 - 1e-6))
    d = layout_one_ply(tree, below)
    assert ply_number_exact(d).ply == 1
    assert ply_number_exact(d.with_alpha(0.34)).ply >= 2
    above = one_ply_params(4, manhattan=True, alpha=0.34)
    assert ply_number_exact(layout_one_ply(tree, above)).ply >= 2


def test_binary_tree_is_one_ply():
    d = layout_one_ply(complete_kary(2, 6), one_ply_params(3))
    assert ply_number_exact(d).ply == 1


def test_edges_decay_geometrically():
    tree = complete_kary(3, 5)
    params = one_ply_params(5)
    d = layout_one_ply(tree, params, root_edge_length=3.0)
    depths = tree.depths
    for (a, b), length in zip(d.edges, d.edge_lengths):
        assert length == pytest.approx(
            3.0 * params.f ** depths[a], rel=1e-9
        )


def test_subtrees_stay_inside_their_wedge():
    tree = random_tree(200, 6, seed=3)
    params = one_ply_params(6)
    d = layout_one_ply(tree, params)
    xy = d.coordinates
    sin = math.sin(math.pi / 6)
    for w in range(tree.n):
        if w == tree.root:
            continue
        incoming = params.f ** (tree.depths[w] - 1)
        assert _subtree_reach(tree, xy, w) <= sin * incoming * (1 + 1e-9)


def test_degree_violation_names_vertex():
    with pytest.raises(ValidationError, match='vertex 0 has degree 4'):
        layout_one_ply(complete_kary(4, 1), one_ply_params(3))


@pytest.mark.slow
@pytest.mark.parametrize('seed', range(20))
@pytest.mark.parametrize('delta', range(3, 13))
def test_random_trees_are_one_ply(delta, seed):
    tree = random_tree(500, delta, seed)
    params = one_ply_params(delta, alpha=compute_alpha_max(delta) * (1 - 1e-6))
    assert ply_number_exact(layout_one_ply(tree, params)).ply == 1


@settings(max_examples=25, deadline=None)
@given(
    st.integers(min_value=3, max_value=12),
    st.integers(min_value=0, max_value=2**31 - 1)
)
def test_small_random_trees_are_one_ply(delta, seed):
    tree = random_tree(60, delta, seed)
    params = one_ply_params(delta, alpha=compute_alpha_max(delta) * (1 - 1e-6))
    assert ply_number_exact(layout_one_ply(tree, params)).ply == 1
