from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from plyforge.drawings import Drawing, Point
from plyforge.exceptions import ValidationError
from plyforge.trees import RootedTree

logger = logging.getLogger(__name__)

# smallest f**height that still leaves edges well above rounding noise
_PRECISION_FLOOR = 1e-8


def _check_delta(delta: int, manhattan: bool) -> None:
    if delta < 3:
        raise ValidationError(f'delta: {delta} must be >= 3')
    if manhattan and delta != 4:
        raise ValidationError(
            f'manhattan: the Manhattan refinement needs delta=4, got {delta}'
        )


def compute_f(delta: int, manhattan: bool = False) -> float:
    """Edge shrink ratio per level: sin(pi/delta) / (1 + sin(pi/delta)),
    or 1/2 for the Manhattan refinement of delta=4.
    """
    _check_delta(delta, manhattan)
    if manhattan:
        return 0.5
    s = math.sin(math.pi / delta)
    return s / (1 + s)


def compute_alpha_max(delta: int, manhattan: bool = False) -> float:
    """Largest ply ratio for which the wedge layout is guaranteed 1-ply.

    The first term keeps a vertex's disk clear of its parent's, the
    second keeps the disks of the closest descendants of two sibling
    subtrees apart.
    """
    f = compute_f(delta, manhattan)
    if manhattan:
        return 1 / 3
    theta = 2 * math.pi / delta
    return min(
        f / (1 + f),
        f * math.sqrt(1 - 2 * f * math.cos(theta) + f ** 2) - f ** 3 / (1 - f)
    )


@dataclass(frozen=True)
class OnePlyParams:
    delta: int
    f: float
    alpha: float
    manhattan: bool = False
    theta: float = field(init=False)

    def __post_init__(self: OnePlyParams) -> None:
        _check_delta(self.delta, self.manhattan)
        if not 0 < self.f < 1:
            raise ValidationError(f'f: {self.f} is outside (0, 1)')
        if not 0 < self.alpha <= 0.5:
            raise ValidationError(f'alpha: {self.alpha} is outside (0, 0.5]')
        object.__setattr__(self, 'theta', 2 * math.pi / self.delta)


def one_ply_params(
    delta: int, manhattan: bool = False, alpha: float | None = None
) -> OnePlyParams:
    f = compute_f(delta, manhattan)
    alpha_max = compute_alpha_max(delta, manhattan)
    if alpha is None:
        alpha = alpha_max
    elif alpha > alpha_max:
        logger.warning(
            f'alpha {alpha} exceeds the guaranteed bound {alpha_max} '
            f'for delta={delta}; the drawing may not be 1-ply'
        )
    return OnePlyParams(delta, f, alpha, manhattan)


def _directions(delta: int) -> np.ndarray:
    """Unit vectors at multiples of pi/delta; near-zero components snap
    to 0 so that axis-parallel directions are exact.
    """
    angles = np.arange(2 * delta) * (math.pi / delta)
    table = np.column_stack([np.cos(angles), np.sin(angles)])
    table[np.abs(table) < 1e-12] = 0.0
    return table


def layout_one_ply(
    tree: RootedTree, params: OnePlyParams, root_edge_length: float = 1.0
) -> Drawing:
    """Fractal wedge layout.

    The plane around every vertex is split into delta wedges of angle
    2*pi/delta. The root's children take the wedges starting at angle 0;
    any other vertex skips the wedge holding its parent edge and fills the
    rest counterclockwise from it. Edges shrink by f per level.

    Args:
        tree (RootedTree): tree with maximum degree <= params.delta
        params (OnePlyParams): delta, f and alpha of the drawing
        root_edge_length (float): length of the edges at the root

    Returns:
        Drawing: root at the origin, alpha = params.alpha
    """
    if not root_edge_length > 0:
        raise ValidationError(
            f'root_edge_length: {root_edge_length} must be > 0'
        )
    for v in tree.order:
        if tree.degree(v) > params.delta:
            raise ValidationError(
                f'vertex {v} has degree {tree.degree(v)}, '
                f'exceeding delta={params.delta}'
            )
    if params.f ** tree.height < _PRECISION_FLOOR:
        logger.warning(
            f'height {tree.height} shrinks edges to '
            f'{params.f ** tree.height:.3g} of the root edge; deep edges '
            f'are close to double-precision noise'
        )

    delta = params.delta
    units = 2 * delta
    table = _directions(delta)
    xy = np.zeros((tree.n, 2))
    # heading of the edge into each vertex, in units of pi/delta
    heading = [0] * tree.n
    length = [root_edge_length] * tree.n

    for v in tree.order:
        for c, child in enumerate(tree.children(v)):
            if v == tree.root:
                unit = (2 * c) % units
                edge = root_edge_length
            else:
                unit = (heading[v] + delta + 2 * (c + 1)) % units
                edge = length[v] * params.f
            heading[child] = unit
            length[child] = edge
            xy[child] = xy[v] + edge * table[unit]

    positions = {v: Point(float(x), float(y)) for v, (x, y) in enumerate(xy)}
    return Drawing(
        params.alpha, positions, tree.edges,
        meta={
            'algorithm': 'oneply', 'delta': delta, 'f': params.f,
            'manhattan': params.manhattan
        }
    )
