import pytest

from plyforge.drawings import Drawing, Point


def make_drawing(points, edges, alpha=0.5, **kwargs):
    return Drawing(
        alpha, {v: Point(*xy) for v, xy in enumerate(points)}, edges,
        **kwargs
    )


@pytest.fixture
def single_edge():
    return make_drawing([(0.0, 0.0), (1.0, 0.0)], [(0, 1)])


@pytest.fixture
def unit_star():
    """K_{1,3} with unit edges 120 degrees apart."""
    return make_drawing(
        [(0.0, 0.0), (1.0, 0.0), (-0.5, 3 ** 0.5 / 2),
         (-0.5, -(3 ** 0.5) / 2)],
        [(0, 1), (0, 2), (0, 3)]
    )
