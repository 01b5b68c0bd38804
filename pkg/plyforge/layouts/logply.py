from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, replace
from datetime import datetime as dt
from typing import Any, Iterator, Sequence

import numpy as np
import pandas as pd

from plyforge.decomposition import (HeavyPathDecomposition,
                                    heavy_path_decompose)
from plyforge.drawings import Drawing, Point
from plyforge.exceptions import PrecisionError, ValidationError
from plyforge.trees import RootedTree, generate_tree

logger = logging.getLogger(__name__)

LOGPLY_ALPHA = 0.5
LAYER_SIZE = 6
# relative gap between consecutive layers around an anchor
LAYER_GAP = 1e-6
SCALE_LIMIT = 1e300
RATIO_WARNING = 1e12


# region layered stars
def layered_star_layout(
    center: Point, base: float, child_count: int, phase: float = 0.0
) -> list[Point]:
    """Places children around a center in layers of six.

    Layer l (from 0) sits at distance base * 3**l; its children are
    60 degrees apart starting at `phase`. At alpha = 1/2 the disks of one
    layer are pairwise tangent and a layer's disks clear the next one's.
    """
    if child_count < 1:
        raise ValidationError(f'child_count: {child_count} must be >= 1')
    if not base > 0:
        raise ValidationError(f'base: {base} must be > 0')
    points = []
    for k in range(child_count):
        layer, slot = divmod(k, LAYER_SIZE)
        radius = base * 3 ** layer
        angle = phase + slot * math.pi / 3
        points.append(Point(
            center.x + radius * math.cos(angle),
            center.y + radius * math.sin(angle)
        ))
    return points


def layer_count(child_count: int) -> int:
    return -(-child_count // LAYER_SIZE)


def layered_tree_layout(tree: RootedTree, base: float = 1.0) -> Drawing:
    """Balanced-tree layout with ply at most height + 1.

    Every child w at distance d_w from its parent draws its own children
    with base d_w / 3**layers(w), which keeps w's whole subtree inside
    w's ply disk; sibling disks are disjoint, so a point meets at most one
    disk per depth.
    """
    if not base > 0:
        raise ValidationError(f'base: {base} must be > 0')
    positions: dict[int, Point] = {tree.root: Point(0.0, 0.0)}
    bases = {tree.root: float(base)}
    smallest = float(base)

    for v in tree.order:
        kids = tree.children(v)
        if not kids:
            continue
        placed = layered_star_layout(positions[v], bases[v], len(kids))
        for k, (w, point) in enumerate(zip(kids, placed)):
            positions[w] = point
            d_w = bases[v] * 3 ** (k // LAYER_SIZE)
            smallest = min(smallest, bases[v])
            if tree.children(w):
                bases[w] = d_w / 3 ** layer_count(len(tree.children(w)))
                if bases[w] < base / SCALE_LIMIT:
                    raise PrecisionError(
                        f'vertex {w}: layered base {bases[w]:.3g} underflows '
                        f'double precision; the tree is too deep'
                    )

    if smallest < base / RATIO_WARNING:
        logger.warning(
            f'layered drawing spans edge lengths {smallest:.3g} to {base}'
        )
    return Drawing(
        LOGPLY_ALPHA, positions, tree.edges,
        meta={'algorithm': 'layered', 'base': base}
    )
# endregion
...


# region draw path
@dataclass(frozen=True)
class PathLayout:
    """
    2-drawing of one path on a segment.

    edge_lengths[0] is l(anchor, v_1), edge_lengths[i] is l(v_i, v_i+1).
    drawing_disk_radius[i] is the radius reserved around v_i+1 for the
    subtrees anchored there; scale is the factor the path was enlarged by
    in the final drawing.
    """
    drawing_disk_radius: tuple[float, ...]
    edge_lengths: tuple[float, ...]
    path: tuple[int, ...] = ()
    anchor: int | None = None
    anchor_distance: float = 0.0
    height: int = 0
    scale: float = 1.0

    @property
    def total_length(self: PathLayout) -> float:
        return float(sum(self.edge_lengths))

    @property
    def vertex_offsets(self: PathLayout) -> tuple[float, ...]:
        """Distance of every path vertex from the first one."""
        return tuple(
            float(x) for x in np.concatenate(
                [[0.0], np.cumsum(self.edge_lengths[1:])]
            )
        )

    def is_two_drawing(self: PathLayout) -> bool:
        lengths = self.edge_lengths
        return all(
            lengths[i] / 2 <= lengths[i + 1] <= 2 * lengths[i]
            for i in range(len(lengths) - 1)
        )

    def to_json(self: PathLayout) -> dict[str, Any]:
        return {
            'path': list(self.path),
            'anchor': self.anchor,
            'height': self.height,
            'edge_lengths': list(self.edge_lengths),
            'drawing_disk_radius': list(self.drawing_disk_radius),
            'scale': self.scale
        }


def draw_path(
    subtree_sizes: Sequence[float], anchored_total: float | None = None
) -> PathLayout:
    """Edge lengths of a path so that every drawing disk fits between its
    neighbours and consecutive edges differ by at most a factor 2.

    Lengths start at l(v, v_1) = max(n_1, 1) and
    l(v_i, v_i+1) = max(n_i + n_i+1, 1). Edges are then visited longest
    first (ties by position), each visit raising both neighbours to at
    least half its length.

    Args:
        subtree_sizes (Sequence[float]): n_1 .. n_k, the size (or drawing
            disk radius) anchored at each path vertex
        anchored_total (float | None): n = sum(n_i) + k, checked if given

    Returns:
        PathLayout: lengths satisfying the 2-drawing property
    """
    sizes = [float(s) for s in subtree_sizes]
    if not sizes:
        raise ValidationError('subtree_sizes: the path is empty')
    for i, s in enumerate(sizes):
        if not (math.isfinite(s) and s >= 0):
            raise ValidationError(
                f'subtree_sizes[{i}]: {s} must be finite and >= 0'
            )
    if anchored_total is not None:
        expected = sum(sizes) + len(sizes)
        if not math.isclose(anchored_total, expected, rel_tol=1e-12):
            raise ValidationError(
                f'anchored_total: {anchored_total} != sum of sizes plus '
                f'path length = {expected}'
            )

    lengths = [max(sizes[0], 1.0)] + [
        max(sizes[i] + sizes[i + 1], 1.0) for i in range(len(sizes) - 1)
    ]
    heap = [(-length, i) for i, length in enumerate(lengths)]
    heapq.heapify(heap)
    visited = [False] * len(lengths)
    while heap:
        negative, i = heapq.heappop(heap)
        if visited[i] or -negative != lengths[i]:
            continue
        visited[i] = True
        half = lengths[i] / 2
        for j in (i - 1, i + 1):
            if 0 <= j < len(lengths) and lengths[j] < half:
                lengths[j] = half
                heapq.heappush(heap, (-half, j))
    return PathLayout(tuple(sizes), tuple(lengths))
# endregion
...


# region layer schedules
@dataclass(frozen=True)
class LayerSchedule:
    """
    Distances x_j from an anchor to the first vertex of its j-th layer.
    Consecutive layers must satisfy x_j+1 >= 3 x_j.
    """
    anchored_total: float
    layer_offsets: tuple[float, ...]

    @classmethod
    def from_anchored_total(
        cls: type[LayerSchedule], n: float, layers: int
    ) -> LayerSchedule:
        """Worst-case schedule x_1 = 6n, x_j = 3 x_j-1 + 6n."""
        if layers < 1:
            raise ValidationError(f'layers: {layers} must be >= 1')
        offsets = [6.0 * n]
        for _ in range(layers - 1):
            offsets.append(3 * offsets[-1] + 6.0 * n)
        return cls(float(n), tuple(offsets))

    @staticmethod
    def closed_form(n: float, j: int) -> float:
        return 3 * n * (3 ** j - 1)

    @property
    def layer_count(self: LayerSchedule) -> int:
        return len(self.layer_offsets)

    @property
    def outer_extent(self: LayerSchedule) -> float:
        return self.layer_offsets[-1] + 6 * self.anchored_total

    def is_separated(self: LayerSchedule) -> bool:
        x = self.layer_offsets
        return all(x[j + 1] >= 3 * x[j] for j in range(len(x) - 1))
# endregion
...


# region heavy path assembly
SCALINGS = ('measured', 'worst_case')


@dataclass(frozen=True)
class _Family:
    """A path with everything anchored below it, in the path's own frame:
    its anchor at the origin and the path running along +x. ids[0] is the
    first path vertex.
    """
    ids: np.ndarray
    xy: np.ndarray
    longest: np.ndarray

    @property
    def _distance(self: _Family) -> np.ndarray:
        return np.hypot(self.xy[:, 0], self.xy[:, 1])

    @property
    def inner(self: _Family) -> float:
        """Distance from the anchor to the nearest ply disk."""
        return float((self._distance - self.longest / 2).min())

    @property
    def outer(self: _Family) -> float:
        """Distance from the anchor to the farthest ply disk boundary."""
        return float((self._distance + self.longest / 2).max())

    def placed(
        self: _Family, t: float, turn: int, at: tuple[float, float],
        shift: float = 0.0
    ) -> _Family:
        """Pushed `shift` along +x, rotated by turn * 90 degrees, scaled
        by t and moved to `at`.
        """
        x, y = self.xy[:, 0] + shift, self.xy[:, 1]
        rotated = np.column_stack([-y, x] if turn > 0 else [y, -x])
        return _Family(
            self.ids, rotated * t + np.array(at), self.longest * t
        )


@dataclass(frozen=True)
class HeavyPathLayout:
    decomposition: HeavyPathDecomposition
    paths: tuple[PathLayout, ...]
    schedules: dict[int, LayerSchedule]
    drawing: Drawing
    scaling: str = 'measured'

    @property
    def ply_bound(self: HeavyPathLayout) -> int:
        return 3 * (self.decomposition.total_height + 1)

    def worst_case_schedule(self: HeavyPathLayout, v: int) -> LayerSchedule:
        """Closed-form offsets for the layers anchored at v."""
        schedule = self.schedules[v]
        return LayerSchedule.from_anchored_total(
            schedule.anchored_total, schedule.layer_count
        )

    def to_json(self: HeavyPathLayout) -> dict[str, Any]:
        return {
            'total_height': self.decomposition.total_height,
            'ply_bound': self.ply_bound,
            'scaling': self.scaling,
            'paths': [p.to_json() for p in self.paths],
            'schedules': [
                {
                    'vertex': v,
                    'anchored_total': s.anchored_total,
                    'layer_offsets': list(s.layer_offsets),
                    'worst_case_offsets': list(
                        self.worst_case_schedule(v).layer_offsets
                    )
                }
                for v, s in sorted(self.schedules.items())
            ]
        }


class HeavyPathAssembler:
    """
    Bottom-up assembly over a heavy-path decomposition.

    With scaling='measured' every path is drawn on a segment by draw_path,
    fed with the measured reach of the families anchored at its vertices.
    The family of the i-th path anchored at a vertex is rotated
    perpendicular to the segment (alternating sides) and scaled so its
    innermost disk clears the outer reach of the previous layer, giving
    nested annuli.

    With scaling='worst_case' draw_path gets the integer anchored sizes n_i,
    a path at decomposition height h is enlarged by 3**(D * (H - h)) with
    D the largest degree, and the j-th family anchored at a vertex starts
    at the worst-case offset 3 n_i (3**j - 1) in its own units.
    """

    def __init__(
        self: HeavyPathAssembler, tree: RootedTree, gap: float = LAYER_GAP,
        scaling: str = 'measured'
    ) -> None:
        if scaling not in SCALINGS:
            raise ValidationError(
                f'scaling: "{scaling}" is not one of {list(SCALINGS)}'
            )
        self._tree = tree
        self._hpd = heavy_path_decompose(tree)
        self._gap = gap
        self._scaling = scaling
        self._layers = {
            'measured': self._measured_layers,
            'worst_case': self._worst_case_layers
        }[scaling]

    def _worst_case_scale(self: HeavyPathAssembler, p: int) -> float:
        exponent = self._tree.max_degree * (
            self._hpd.total_height - self._hpd.heights[p]
        )
        if exponent * math.log(3) > math.log(SCALE_LIMIT):
            raise PrecisionError(
                f'path {p}: scale 3**{exponent} exceeds {SCALE_LIMIT}'
            )
        return 3.0 ** exponent

    def _measured_layers(
        self: HeavyPathAssembler, v: int, families: dict[int, _Family],
        layouts: dict[int, PathLayout], relative: dict[int, float]
    ) -> tuple[list[tuple[_Family, float, float]], float,
               LayerSchedule | None]:
        """Families anchored at v with their layer scale and the length
        of the edge from v to their first vertex, the reserved drawing
        disk radius, and the realised layer offsets.
        """
        layers: list[tuple[_Family, float, float]] = []
        offsets: list[float] = []
        reach = 0.0
        for j, q in enumerate(self._hpd.anchored_paths(v)):
            family = families.pop(q)
            t = 1.0 if j == 0 else reach * (1 + self._gap) / family.inner
            if not (math.isfinite(t) and t <= SCALE_LIMIT):
                raise PrecisionError(
                    f'vertex {v}: layer {j} needs scale {t:.3g}, beyond '
                    f'double precision'
                )
            relative[q] = t
            edge = t * layouts[q].anchor_distance
            layers.append((family, t, edge))
            offsets.append(edge)
            reach = family.outer * t
        if not layers:
            return layers, 0.0, None
        schedule = LayerSchedule(
            float(self._hpd.anchored_subtree_size[v]), tuple(offsets)
        )
        return layers, reach * (1 + self._gap), schedule

    def _worst_case_layers(
        self: HeavyPathAssembler, v: int, families: dict[int, _Family],
        layouts: dict[int, PathLayout], relative: dict[int, float]
    ) -> tuple[list[tuple[_Family, float, float]], float,
               LayerSchedule | None]:
        anchored = self._hpd.anchored_paths(v)
        if not anchored:
            return [], 0.0, None
        n = self._hpd.anchored_subtree_size[v]
        schedule = LayerSchedule.from_anchored_total(n, len(anchored))
        layers = []
        for j, q in enumerate(anchored):
            edge = schedule.layer_offsets[j] * self._worst_case_scale(q)
            if not math.isfinite(edge):
                raise PrecisionError(
                    f'vertex {v}: layer {j} offset overflows double precision'
                )
            layers.append((families.pop(q), 1.0, edge))
        return layers, float(n), schedule

    def assemble(self: HeavyPathAssembler) -> HeavyPathLayout:
        _t = dt.now()
        hpd = self._hpd
        worst_case = self._scaling == 'worst_case'
        families: dict[int, _Family] = {}
        layouts: dict[int, PathLayout] = {}
        relative: dict[int, float] = {}
        schedules: dict[int, LayerSchedule] = {}

        for p in reversed(range(len(hpd.paths))):
            path = hpd.paths[p]
            per_vertex = []
            radii = []
            for v in path:
                layers, radius, schedule = self._layers(
                    v, families, layouts, relative
                )
                per_vertex.append(layers)
                radii.append(radius)
                if schedule is not None:
                    schedules[v] = schedule

            if worst_case:
                drawn = draw_path(
                    radii, self._tree.subtree_size(path[0])
                )
                unit = self._worst_case_scale(p)
                anchor_distance = 0.0
            else:
                drawn = draw_path(radii)
                unit = 1.0
                anchor_distance = (
                    0.0 if hpd.anchor(p) is None else 2 * drawn.edge_lengths[0]
                )
            lengths = [unit * length for length in drawn.edge_lengths]
            xs = unit * (anchor_distance + np.array(drawn.vertex_offsets))

            ids = [np.array(path)]
            xy = [np.column_stack([xs, np.zeros(len(path))])]
            longest = np.zeros(len(path))
            blocks = [longest]
            for i, layers in enumerate(per_vertex):
                incident = [lengths[i + 1]] if i + 1 < len(path) else []
                if i > 0:
                    incident.append(lengths[i])
                elif hpd.anchor(p) is not None:
                    incident.append(anchor_distance)
                for j, (family, t, edge) in enumerate(layers):
                    moved = family.placed(
                        t, 1 if j % 2 == 0 else -1, (float(xs[i]), 0.0),
                        shift=edge if worst_case else 0.0
                    )
                    moved.longest[0] = max(moved.longest[0], edge)
                    incident.append(edge)
                    ids.append(moved.ids)
                    xy.append(moved.xy)
                    blocks.append(moved.longest)
                longest[i] = max(incident, default=0.0)

            families[p] = _Family(
                np.concatenate(ids), np.concatenate(xy),
                np.concatenate(blocks)
            )
            layouts[p] = replace(
                drawn, path=path, anchor=hpd.anchor(p),
                anchor_distance=anchor_distance, height=hpd.heights[p]
            )

        if worst_case:
            scales = [self._worst_case_scale(p) for p in range(len(hpd.paths))]
        else:
            scales = [1.0] * len(hpd.paths)
            for p in range(1, len(hpd.paths)):
                scales[p] = scales[hpd.parent_path(p)] * relative[p]
                if scales[p] > SCALE_LIMIT:
                    raise PrecisionError(
                        f'path {p}: scale {scales[p]:.3g} exceeds '
                        f'{SCALE_LIMIT}'
                    )
        paths = tuple(
            replace(layouts[p], scale=scales[p]) for p in range(len(scales))
        )

        root = families[0]
        positions = {
            int(v): Point(float(x), float(y))
            for v, (x, y) in zip(root.ids, root.xy)
        }
        drawing = Drawing(
            LOGPLY_ALPHA, positions, self._tree.edges,
            meta={
                'algorithm': 'heavypath',
                'scaling': self._scaling,
                'total_height': hpd.total_height
            }
        )
        ratio, _ = area_stats(drawing)
        if ratio > RATIO_WARNING:
            logger.warning(
                f'edge lengths span a ratio of {ratio:.3g}; ply queries may '
                f'be tolerance-sensitive'
            )
        logger.info(
            f'{self._scaling} heavy-path drawing of {self._tree.n} vertices, '
            f'H={hpd.total_height} (done in {dt.now() - _t})'
        )
        return HeavyPathLayout(
            hpd, paths, schedules, drawing, scaling=self._scaling
        )


def heavy_path_layout(
    tree: RootedTree, scaling: str = 'measured'
) -> HeavyPathLayout:
    return HeavyPathAssembler(tree, scaling=scaling).assemble()


def assemble_heavy_path_drawing(
    tree: RootedTree, scaling: str = 'measured'
) -> Drawing:
    return heavy_path_layout(tree, scaling).drawing
# endregion
...


# region area
@dataclass(frozen=True)
class AreaStats:
    edge_ratio: float
    area: float

    def __iter__(self: AreaStats) -> Iterator[float]:
        return iter((self.edge_ratio, self.area))


def area_stats(d: Drawing) -> AreaStats:
    """Longest over shortest edge, and the bounding-box area in units of
    the shortest edge (each side counted as at least one unit).
    """
    lengths = d.edge_lengths
    if not len(lengths):
        return AreaStats(1.0, 0.0)
    shortest = float(lengths.min())
    span = np.ptp(d.coordinates, axis=0) / shortest
    return AreaStats(
        float(lengths.max()) / shortest,
        float(max(span[0], 1.0) * max(span[1], 1.0))
    )


def area_growth(
    sizes: Sequence[int], delta: int = 3, seed: int = 0
) -> pd.DataFrame:
    """Heavy-path drawings of random trees of the given sizes.

    Returns:
        pd.DataFrame: one row per size with n, H, ply_bound, area and
            ratio; df.attrs['slope'] holds the log-log slope of area
            against n
    """
    rows = []
    for n in sizes:
        tree = generate_tree('random', n=n, delta=delta, seed=seed)
        layout = heavy_path_layout(tree)
        stats = area_stats(layout.drawing)
        rows.append({
            'n': n,
            'H': layout.decomposition.total_height,
            'ply_bound': layout.ply_bound,
            'area': stats.area,
            'ratio': stats.edge_ratio
        })
    df = pd.DataFrame(rows, columns=['n', 'H', 'ply_bound', 'area', 'ratio'])
    usable = df[df['area'] > 0]
    if usable['n'].nunique() >= 2:
        slope, _ = np.polyfit(
            np.log(usable['n']), np.log(usable['area']), 1
        )
        df.attrs['slope'] = float(slope)
    return df
# endregion
