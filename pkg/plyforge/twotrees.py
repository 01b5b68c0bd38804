from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from plyforge.exceptions import ValidationError

# (u, v) for the base edge, (w, p, q) for every later vertex
Step = tuple[int, ...]


@dataclass(frozen=True)
class TwoTree:
    """
    Graph together with the order it was built in: a base edge, then
    vertices each attached to two parents.
    """
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    construction_order: tuple[Step, ...] = field(default_factory=tuple)

    @classmethod
    def from_steps(cls: type[TwoTree], steps: list[Step]) -> TwoTree:
        """Builds the vertex and edge sets implied by the steps."""
        vertices: list[int] = []
        edges: list[tuple[int, int]] = []
        for step in steps:
            if len(step) == 2:
                vertices.extend(step)
                edges.append((step[0], step[1]))
            else:
                w, p, q = step
                vertices.append(w)
                edges.extend([(p, w), (q, w)])
        return cls(tuple(vertices), tuple(edges), tuple(steps))

    @classmethod
    def from_json(cls: type[TwoTree], data: dict[str, Any]) -> TwoTree:
        try:
            return cls(
                tuple(int(v) for v in data['vertices']),
                tuple((int(a), int(b)) for a, b in data['edges']),
                tuple(
                    tuple(int(x) for x in s)
                    for s in data['construction_order']
                )
            )
        except KeyError as e:
            raise ValidationError(f'two-tree: missing field {e}')
        except (TypeError, ValueError):
            raise ValidationError('two-tree: malformed vertex or edge record')

    def to_json(self: TwoTree) -> dict[str, Any]:
        return {
            'vertices': list(self.vertices),
            'edges': [list(e) for e in self.edges],
            'construction_order': [list(s) for s in self.construction_order]
        }


def validate_two_tree(g: TwoTree) -> bool:
    """True iff the construction order witnesses that g is a 2-tree:
    it starts from a single edge, every later vertex is new and attaches
    to two distinct parents that are adjacent at insertion time, and the
    replayed graph is exactly g.
    """
    order = g.construction_order
    if not order or len(order[0]) != 2:
        return False
    u, v = order[0]
    if u == v:
        return False

    seen = {u, v}
    adjacent = {frozenset((u, v))}
    for step in order[1:]:
        if len(step) != 3:
            return False
        w, p, q = step
        if w in seen or p == q or p not in seen or q not in seen:
            return False
        if frozenset((p, q)) not in adjacent:
            return False
        seen.add(w)
        adjacent.update((frozenset((p, w)), frozenset((q, w))))

    edges = {frozenset(e) for e in g.edges}
    if any(len(e) != 2 for e in edges):
        return False
    return seen == set(g.vertices) and adjacent == edges
