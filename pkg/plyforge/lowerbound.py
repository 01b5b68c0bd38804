from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from datetime import datetime as dt
from typing import Any, Callable, Sequence

import numpy as np
import pandas as pd

from plyforge import config
from plyforge.drawings import Drawing, Point
from plyforge.exceptions import PrecisionError, ValidationError
from plyforge.layouts.oneply import layout_one_ply, one_ply_params
from plyforge.ply.disks import (PlyDisk, area_ratio_lower_bound,
                                closed_inside, ply_disks, strictly_inside)
from plyforge.trees import complete_kary
from plyforge.twotrees import Step, TwoTree

logger = logging.getLogger(__name__)


# region instance
def instance_params(n_target: int) -> tuple[int, int]:
    """h = ceil((log2 n + log2 log2 n) / 2), m = ceil(sqrt(n / log2 n))."""
    if n_target < 16:
        raise ValidationError(f'n_target: {n_target} must be >= 16')
    log_n = math.log2(n_target)
    h = math.ceil((log_n + math.log2(log_n)) / 2)
    m = math.ceil(math.sqrt(n_target / log_n))
    return h, m


@dataclass(frozen=True)
class LowerBoundInstance:
    """
    m complete binary trees of height h plus an apex adjacent to every
    tree vertex. The apex is vertex 0; tree i holds the ids
    1 + i*s .. (i+1)*s with s = 2^(h+1) - 1, numbered as a binary heap.
    """
    n_target: int
    h: int
    m: int
    apex: int
    trees: tuple[tuple[int, ...], ...]
    graph: TwoTree

    @property
    def tree_size(self: LowerBoundInstance) -> int:
        return 2 ** (self.h + 1) - 1

    @property
    def vertex_count(self: LowerBoundInstance) -> int:
        return self.m * self.tree_size + 1

    def root(self: LowerBoundInstance, i: int) -> int:
        return self.trees[i][0]

    @staticmethod
    def level(position: int) -> int:
        """Depth of the heap position inside its tree."""
        return (position + 1).bit_length() - 1

    @property
    def core_edges(self: LowerBoundInstance) -> tuple[tuple[int, int], ...]:
        """Apex and tree edges, without the links between tree roots."""
        roots = {self.root(i) for i in range(self.m)}
        return tuple(
            (a, b) for a, b in self.graph.edges
            if not (a in roots and b in roots)
        )

    def to_json(self: LowerBoundInstance) -> dict[str, Any]:
        return {
            'n_target': self.n_target,
            'h': self.h,
            'm': self.m,
            'apex': self.apex,
            'trees': [list(t) for t in self.trees],
            **self.graph.to_json()
        }

    @classmethod
    def from_json(
        cls: type[LowerBoundInstance], data: dict[str, Any]
    ) -> LowerBoundInstance:
        try:
            instance = build_instance_from_params(
                int(data['h']), int(data['m']),
                n_target=int(data.get('n_target', 0))
            )
        except KeyError as e:
            raise ValidationError(f'instance: missing field {e}')
        except (TypeError, ValueError):
            raise ValidationError('instance: h and m must be integers')
        if 'edges' not in data:
            return instance
        try:
            edges = {frozenset(e) for e in data['edges']}
        except TypeError:
            raise ValidationError(
                f'edges: expected pairs of vertex ids, got {data["edges"]!r}'
            )
        if edges != {frozenset(e) for e in instance.graph.edges}:
            raise ValidationError(
                'instance: edges do not match the h, m construction'
            )
        return instance


def build_instance_from_params(
    h: int, m: int, n_target: int = 0
) -> LowerBoundInstance:
    if h < 1:
        raise ValidationError(f'h: {h} must be >= 1')
    if m < 1:
        raise ValidationError(f'm: {m} must be >= 1')
    apex = 0
    size = 2 ** (h + 1) - 1
    trees = tuple(
        tuple(range(1 + i * size, 1 + (i + 1) * size)) for i in range(m)
    )

    first_root = trees[0][0]
    steps: list[Step] = [(apex, first_root)]
    for i, tree in enumerate(trees):
        if i:
            steps.append((tree[0], apex, first_root))
        for k in range(1, size):
            steps.append((tree[k], apex, tree[(k - 1) // 2]))
    graph = TwoTree.from_steps(steps)
    logger.debug(f'lower-bound instance h={h}, m={m}: {len(graph.vertices)}')
    return LowerBoundInstance(n_target, h, m, apex, trees, graph)


def build_instance(n_target: int) -> LowerBoundInstance:
    h, m = instance_params(n_target)
    return build_instance_from_params(h, m, n_target=n_target)
# endregion
...


# region far neighbours
def _require_edges(d: Drawing, pairs: Sequence[tuple[int, int]]) -> None:
    present = {frozenset(e) for e in d.edges}
    for a, b in pairs:
        if frozenset((a, b)) not in present:
            raise ValidationError(f'edges: ({a}, {b}) is not in the drawing')


def lemma5_check(d: Drawing, v: int, w1: int, w2: int) -> bool:
    """True iff |v w1| > (1 + 1/alpha) |v w2| on the triangle v, w1, w2.

    When it holds, the edge w1 w2 is longer than |v w2| / alpha, so the
    ply disk of w2 contains v; this is confirmed against the drawing.
    A disk that misses v raises PrecisionError.
    """
    _require_edges(d, [(v, w1), (v, w2), (w1, w2)])
    p = d.positions
    c = 1 + 1 / d.alpha
    near = p[v].distance_to(p[w2])
    holds = p[v].distance_to(p[w1]) > c * near
    if holds:
        radius = d.alpha * float(d.longest_incident[d.index_of[w2]])
        tau = config.TOLERANCE
        if strictly_inside(np.float64(near), np.float64(radius), tau):
            pass
        elif closed_inside(np.float64(near), np.float64(radius), tau):
            logger.warning(
                f'disk of {w2} contains {v} only within tolerance '
                f'(distance {near}, radius {radius})'
            )
        else:
            raise PrecisionError(
                f'disk of {w2} misses {v} (distance {near}, radius '
                f'{radius}); coordinates are not trustworthy'
            )
    return bool(holds)
# endregion
...


# region certificate
@dataclass(frozen=True)
class AnnulusAnalysis:
    """
    Vertices of one tree binned into annuli S_l = [c^l, c^(l+1)) around
    the apex for -h <= l <= h-1, distances measured in units of the
    apex-root distance.
    """
    tree_index: int
    unit: float
    c: float
    h: int
    counts: tuple[int, ...]
    best_index: int
    enclosing_radius: float
    disks_used: tuple[int, ...]
    certified_bound: float

    @property
    def annuli(self: AnnulusAnalysis) -> list[tuple[int, float, float]]:
        return [
            (l, self.c ** l, self.c ** (l + 1))
            for l in range(-self.h, self.h)
        ]

    def to_json(self: AnnulusAnalysis) -> dict[str, Any]:
        return {
            'tree_index': self.tree_index,
            'unit': self.unit,
            'c': self.c,
            'counts': {
                str(l): n for (l, _, _), n in zip(self.annuli, self.counts)
            },
            'best_index': self.best_index,
            'enclosing_radius': self.enclosing_radius,
            'disks_used': list(self.disks_used),
            'certified_bound': self.certified_bound
        }


@dataclass(frozen=True)
class LowerBoundCertificate:
    bound: float
    case: str
    tree_index: int | None
    apex_cover_counts: tuple[int, ...]
    analyses: tuple[AnnulusAnalysis, ...] = field(default_factory=tuple)
    violations: tuple[tuple[int, int, int, float], ...] = field(
        default_factory=tuple
    )

    def to_json(self: LowerBoundCertificate) -> dict[str, Any]:
        return {
            'bound': self.bound,
            'case': self.case,
            'tree_index': self.tree_index,
            'apex_cover_counts': list(self.apex_cover_counts),
            'annulus_analyses': [a.to_json() for a in self.analyses],
            'distance_violations': [
                {'tree': t, 'vertex': w, 'level': j, 'distance': r}
                for t, w, j, r in self.violations
            ]
        }


def _check_drawing(d: Drawing, instance: LowerBoundInstance) -> None:
    missing = set(instance.graph.vertices) - set(d.positions)
    if missing:
        raise ValidationError(
            f'drawing: instance vertices {sorted(missing)[:5]} have no '
            f'position'
        )
    drawn = {frozenset(e) for e in d.edges}
    for a, b in instance.core_edges:
        if frozenset((a, b)) not in drawn:
            raise ValidationError(
                f'drawing: instance edge ({a}, {b}) is not drawn'
            )


def _annulus_analysis(
    i: int, instance: LowerBoundInstance, apex: Point,
    disks: dict[int, PlyDisk], alpha: float
) -> AnnulusAnalysis:
    c = 1 + 1 / alpha
    h = instance.h
    tree = instance.trees[i]
    unit = apex.distance_to(disks[tree[0]].center)
    distance = np.array(
        [apex.distance_to(disks[w].center) for w in tree]
    ) / unit
    with np.errstate(divide='ignore'):
        index = np.floor(np.log(distance) / math.log(c))
    inside = (index >= -h) & (index <= h - 1)
    counts = tuple(int((index[inside] == l).sum()) for l in range(-h, h))
    best = int(np.argmax(counts)) - h

    radius = (alpha + 1) * c ** (best + 1) * unit
    used = [
        disks[w] for w, l in zip(tree, index)
        if l == best
        and disks[w].center.distance_to(apex) + disks[w].radius <= radius
    ]
    bound = area_ratio_lower_bound(used, apex, radius) if used else 0.0
    return AnnulusAnalysis(
        i, unit, c, h, counts, best, radius,
        tuple(disk.vertex for disk in used), bound
    )


def _distance_violations(
    i: int, instance: LowerBoundInstance, apex: Point,
    disks: dict[int, PlyDisk], c: float
) -> list[tuple[int, int, int, float]]:
    """Tree vertices at level j outside [c^-j, c^j] of the apex, in units
    of the apex-root distance.
    """
    tree = instance.trees[i]
    unit = apex.distance_to(disks[tree[0]].center)
    tau = config.TOLERANCE
    out = []
    for k, w in enumerate(tree):
        j = instance.level(k)
        r = apex.distance_to(disks[w].center) / unit
        if r < c ** -j * (1 - tau) or r > c ** j * (1 + tau):
            out.append((i, w, j, r))
    return out


def certify_lower_bound(
    d: Drawing, instance: LowerBoundInstance, alpha: float | None = None
) -> LowerBoundCertificate:
    """Sound ply lower bound for a drawing of a lower-bound instance.

    If every tree has a disk over the apex the bound is m. Otherwise
    each uncovered tree is binned into annuli around the apex and the
    fullest annulus gives an area-ratio bound over the disks contained
    in a disk around the apex. The best applicable case is returned.
    """
    _t = dt.now()
    _check_drawing(d, instance)
    if alpha is not None and alpha != d.alpha:
        d = d.with_alpha(alpha)
    alpha = d.alpha
    c = 1 + 1 / alpha
    disks = {disk.vertex: disk for disk in ply_disks(d)}
    apex = d.positions[instance.apex]
    tau = config.TOLERANCE

    cover_counts = []
    for tree in instance.trees:
        covering = 0
        for w in tree:
            disk = disks[w]
            if strictly_inside(
                np.float64(disk.center.distance_to(apex)),
                np.float64(disk.radius), tau
            ):
                covering += 1
        cover_counts.append(covering)

    candidates: list[tuple[float, str, int | None]] = []
    if all(cover_counts):
        candidates.append((float(instance.m), 'apex_cover', None))

    analyses = []
    violations = []
    for i, covering in enumerate(cover_counts):
        if covering:
            continue
        analysis = _annulus_analysis(i, instance, apex, disks, alpha)
        analyses.append(analysis)
        candidates.append((analysis.certified_bound, 'annulus', i))
        violations.extend(_distance_violations(i, instance, apex, disks, c))

    if violations:
        logger.warning(
            f'{len(violations)} tree vertices break the distance induction '
            f'although their tree does not cover the apex'
        )
    # ties keep the apex case, then the lowest tree index
    bound, case, tree_index = max(
        candidates, key=lambda x: (x[0], x[1] == 'apex_cover', -(x[2] or 0))
    )
    logger.info(
        f'certified ply >= {bound:.4g} ({case}) (done in {dt.now() - _t})'
    )
    return LowerBoundCertificate(
        bound, case, tree_index, tuple(cover_counts), tuple(analyses),
        tuple(violations)
    )
# endregion
...


# region drawings of instances
def _radial_trees(
    instance: LowerBoundInstance, rng: np.random.Generator
) -> dict[int, Point]:
    params = one_ply_params(3)
    tree = complete_kary(2, instance.h)
    local = layout_one_ply(tree, params).coordinates
    ring = max(4.0, 1.2 * instance.m)
    positions = {instance.apex: Point(0.0, 0.0)}
    for i, ids in enumerate(instance.trees):
        theta = 2 * math.pi * i / instance.m
        rotation = np.array([
            [math.cos(theta), -math.sin(theta)],
            [math.sin(theta), math.cos(theta)]
        ])
        placed = local @ rotation.T + ring * np.array(
            [math.cos(theta), math.sin(theta)]
        )
        # complete_kary numbers breadth-first, matching the heap order
        for w, (x, y) in zip(ids, placed):
            positions[w] = Point(float(x), float(y))
    return positions


def _random(
    instance: LowerBoundInstance, rng: np.random.Generator
) -> dict[int, Point]:
    xy = rng.random((instance.vertex_count, 2))
    return {
        v: Point(float(x), float(y))
        for v, (x, y) in zip(instance.graph.vertices, xy)
    }


STRATEGY_MAP: dict[str, Callable[..., dict[int, Point]]] = {
    'radial_trees': _radial_trees,
    'random': _random,
}


def apex_layout(
    instance: LowerBoundInstance, strategy: str = 'radial_trees',
    seed: int | None = None, alpha: float = 0.5
) -> Drawing:
    """A drawing of the instance: `radial_trees` draws every tree with the
    wedge layout on a ring around the apex, `random` places all vertices
    uniformly in the unit square.
    """
    try:
        place = STRATEGY_MAP[strategy]
    except KeyError:
        raise ValidationError(
            f'strategy: unknown apex layout "{strategy}", expected one of '
            f'{sorted(STRATEGY_MAP)}'
        )
    positions = place(instance, np.random.default_rng(seed))
    return Drawing(
        alpha, positions, instance.graph.edges,
        meta={
            'algorithm': 'apex', 'strategy': strategy,
            'h': instance.h, 'm': instance.m
        }
    )


def growth_diagnostic(
    n_targets: Sequence[int] = (64, 256, 1024, 4096), attempts: int = 3,
    seed: int = 0
) -> pd.DataFrame:
    """Best certified bound over the tool's own drawings per instance size.

    The first attempt uses the radial layout, the rest random placements.
    """
    rows = []
    for n_target in n_targets:
        instance = build_instance(n_target)
        best = 0.0
        for k in range(attempts):
            strategy = 'radial_trees' if k == 0 else 'random'
            drawing = apex_layout(instance, strategy, seed=seed + k)
            best = max(best, certify_lower_bound(drawing, instance).bound)
        rows.append({
            'n_target': n_target,
            'h': instance.h,
            'm': instance.m,
            'vertices': instance.vertex_count,
            'best_bound': best,
            'trend': math.sqrt(n_target / math.log2(n_target))
        })
    return pd.DataFrame(rows)
# endregion
