from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

import numpy as np

from plyforge.exceptions import ValidationError


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self: Point) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f'point ({self.x}, {self.y}) is not finite')

    def distance_to(self: Point, other: Point) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_tuple(self: Point) -> tuple[float, float]:
        return (self.x, self.y)


class Drawing:
    """
    Straight-line drawing: vertex positions, an edge list and the ply
    ratio alpha the drawing is measured with.
    """

    def __init__(
        self: Drawing, alpha: float, positions: Mapping[int, Point],
        edges: Iterable[tuple[int, int]], allow_any_alpha: bool = False,
        meta: dict[str, Any] | None = None
    ) -> None:
        self._alpha = float(alpha)
        self._positions = dict(positions)
        self._edges = tuple((int(a), int(b)) for a, b in edges)
        if meta is not None and not isinstance(meta, Mapping):
            raise ValidationError(
                f'meta: expected an object, got {type(meta).__name__}'
            )
        self.meta = dict(meta or {})
        self._validate(allow_any_alpha)

    def _validate(self: Drawing, allow_any_alpha: bool) -> None:
        if not allow_any_alpha and not 0 < self._alpha <= 0.5:
            raise ValidationError(
                f'alpha: {self._alpha} is outside (0, 0.5]'
            )
        if not self._alpha > 0:
            raise ValidationError(f'alpha: {self._alpha} must be positive')
        for a, b in self._edges:
            for v in (a, b):
                if v not in self._positions:
                    raise ValidationError(
                        f'edges: endpoint {v} of edge ({a}, {b}) '
                        f'has no position'
                    )
            if self._positions[a] == self._positions[b]:
                raise ValidationError(
                    f'edges: edge ({a}, {b}) has zero length'
                )

    # region properties
    @property
    def alpha(self: Drawing) -> float:
        return self._alpha

    @property
    def positions(self: Drawing) -> dict[int, Point]:
        return self._positions

    @property
    def edges(self: Drawing) -> tuple[tuple[int, int], ...]:
        return self._edges

    @property
    def vertex_ids(self: Drawing) -> np.ndarray:
        try:
            return self._vertex_ids
        except AttributeError:
            self._vertex_ids = np.array(sorted(self._positions), dtype=int)
            return self._vertex_ids

    @property
    def coordinates(self: Drawing) -> np.ndarray:
        """(n, 2) array of positions in vertex_ids order."""
        try:
            return self._coordinates
        except AttributeError:
            self._coordinates = np.array(
                [self._positions[v].as_tuple() for v in self.vertex_ids],
                dtype=float
            ).reshape(-1, 2)
            return self._coordinates

    @property
    def index_of(self: Drawing) -> dict[int, int]:
        try:
            return self._index_of
        except AttributeError:
            self._index_of = {
                int(v): i for i, v in enumerate(self.vertex_ids)
            }
            return self._index_of

    @property
    def edge_lengths(self: Drawing) -> np.ndarray:
        try:
            return self._edge_lengths
        except AttributeError:
            if not self._edges:
                self._edge_lengths = np.zeros(0)
                return self._edge_lengths
            ends = self._edge_index
            xy = self.coordinates
            delta = xy[ends[:, 0]] - xy[ends[:, 1]]
            self._edge_lengths = np.hypot(delta[:, 0], delta[:, 1])
            return self._edge_lengths

    @property
    def longest_incident(self: Drawing) -> np.ndarray:
        """Longest incident edge per vertex (0 for isolated vertices)."""
        try:
            return self._longest_incident
        except AttributeError:
            longest = np.zeros(len(self.vertex_ids))
            if self._edges:
                ends = self._edge_index
                np.maximum.at(longest, ends[:, 0], self.edge_lengths)
                np.maximum.at(longest, ends[:, 1], self.edge_lengths)
            self._longest_incident = longest
            return self._longest_incident

    @property
    def _edge_index(self: Drawing) -> np.ndarray:
        try:
            return self._edge_rows
        except AttributeError:
            index_of = self.index_of
            self._edge_rows = np.array(
                [(index_of[a], index_of[b]) for a, b in self._edges],
                dtype=int
            ).reshape(-1, 2)
            return self._edge_rows
    # endregion
    ...

    # region transforms
    def scaled(self: Drawing, factor: float) -> Drawing:
        return self._mapped(lambda p: Point(p.x * factor, p.y * factor))

    def translated(self: Drawing, dx: float, dy: float) -> Drawing:
        return self._mapped(lambda p: Point(p.x + dx, p.y + dy))

    def with_alpha(self: Drawing, alpha: float) -> Drawing:
        return Drawing(
            alpha, self._positions, self._edges, allow_any_alpha=True,
            meta=self.meta
        )

    def _mapped(self: Drawing, fn: Any) -> Drawing:
        return Drawing(
            self._alpha, {v: fn(p) for v, p in self._positions.items()},
            self._edges, allow_any_alpha=True, meta=self.meta
        )
    # endregion
    ...

    # region json
    @classmethod
    def from_json(cls: type[Drawing], data: dict[str, Any]) -> Drawing:
        """Parses `{"alpha": float, "vertices": [{"id", "x", "y"}],
        "edges": [[int, int], ...]}`.
        """
        if not isinstance(data, dict):
            raise ValidationError('drawing: expected a JSON object')
        for key_ in ('alpha', 'vertices', 'edges'):
            if key_ not in data:
                raise ValidationError(f'drawing: missing field "{key_}"')
        if not isinstance(data['vertices'], list):
            raise ValidationError(
                f'vertices: expected a list of vertex records, got '
                f'{data["vertices"]!r}'
            )
        positions: dict[int, Point] = {}
        for record in data['vertices']:
            try:
                id_ = int(record['id'])
                point = Point(float(record['x']), float(record['y']))
            except (KeyError, TypeError, ValueError):
                raise ValidationError(
                    f'vertices: malformed vertex record {record!r}'
                )
            if id_ in positions:
                raise ValidationError(f'vertices: duplicate id {id_}')
            positions[id_] = point
        try:
            edges = [(int(a), int(b)) for a, b in data['edges']]
        except (TypeError, ValueError):
            raise ValidationError('edges: expected pairs of vertex ids')
        try:
            alpha = float(data['alpha'])
        except (TypeError, ValueError):
            raise ValidationError(f'alpha: not a number: {data["alpha"]!r}')
        return cls(
            alpha, positions, edges,
            allow_any_alpha=bool(data.get('allow_any_alpha', False)),
            meta=data.get('meta')
        )

    def to_json(self: Drawing) -> dict[str, Any]:
        data: dict[str, Any] = {
            'alpha': self._alpha,
            'vertices': [
                {'id': int(v), 'x': self._positions[v].x,
                 'y': self._positions[v].y}
                for v in self.vertex_ids
            ],
            'edges': [list(e) for e in self._edges]
        }
        if not 0 < self._alpha <= 0.5:
            data['allow_any_alpha'] = True
        if self.meta:
            data['meta'] = self.meta
        return data
    # endregion
    ...

    def __repr__(self: Drawing) -> str:
        return (
            f'Drawing(alpha={self._alpha}, vertices={len(self._positions)}, '
            f'edges={len(self._edges)})'
        )
