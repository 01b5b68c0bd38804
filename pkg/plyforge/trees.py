from __future__ import annotations

import inspect
import logging
from collections import deque
from typing import Any, Callable, Iterator, Sequence

import numpy as np

from plyforge.exceptions import ValidationError

logger = logging.getLogger(__name__)


class RootedTree:
    """
    Ordered rooted tree on the vertex ids 0..n-1.

    Children are kept in the order given; layouts consume them in that
    order. Subtree sizes are cached at construction and the structure is
    immutable afterwards.
    """

    def __init__(
        self: RootedTree, children: Sequence[Sequence[int]],
        root: int = 0, delta: int | None = None
    ) -> None:
        self._children = tuple(
            tuple(int(c) for c in kids) for kids in children
        )
        self._root = int(root)
        self._parents = self._link_parents()
        self._order = self._bfs_order()
        self._sizes = self.recompute_subtree_sizes()
        self._delta = self.max_degree if delta is None else int(delta)
        self._check_degrees()

    # region construction
    @classmethod
    def from_parents(
        cls: type[RootedTree], parents: Sequence[int | None],
        delta: int | None = None
    ) -> RootedTree:
        """Builds a tree from a parent array (None marks the root).
        Children are ordered by ascending id.
        """
        children: list[list[int]] = [[] for _ in parents]
        roots = [v for v, p in enumerate(parents) if p is None]
        if len(roots) != 1:
            raise ValidationError(
                f'parents: expected exactly one root, found {len(roots)}'
            )
        for v, p in enumerate(parents):
            if p is None:
                continue
            if not 0 <= p < len(parents):
                raise ValidationError(f'parents[{v}]: unknown vertex {p}')
            children[p].append(v)
        return cls(children, root=roots[0], delta=delta)

    @classmethod
    def from_json(cls: type[RootedTree], data: dict[str, Any]) -> RootedTree:
        """Parses the Tree JSON format
        `{"root": id, "nodes": [{"id": int, "children": [int, ...]}]}`.
        """
        if not isinstance(data, dict):
            raise ValidationError('tree: expected a JSON object')
        for key_ in ('root', 'nodes'):
            if key_ not in data:
                raise ValidationError(f'tree: missing field "{key_}"')
        nodes = data['nodes']
        if not isinstance(nodes, list) or not nodes:
            raise ValidationError('nodes: expected a non-empty list')

        children: dict[int, list[int]] = {}
        for node in nodes:
            try:
                id_ = int(node['id'])
                kids = [int(c) for c in node.get('children', [])]
            except (KeyError, TypeError, ValueError):
                raise ValidationError(f'nodes: malformed node record {node!r}')
            if id_ in children:
                raise ValidationError(f'nodes: duplicate id {id_}')
            children[id_] = kids

        if sorted(children) != list(range(len(children))):
            raise ValidationError('nodes: ids must be consecutive from 0')
        try:
            root = int(data['root'])
        except (TypeError, ValueError):
            raise ValidationError(f'root: not an integer: {data["root"]!r}')
        delta = data.get('delta')
        return cls(
            [children[v] for v in range(len(children))], root=root,
            delta=None if delta is None else int(delta)
        )

    def to_json(self: RootedTree) -> dict[str, Any]:
        return {
            'root': self.root,
            'delta': self.delta,
            'nodes': [
                {'id': v, 'children': list(self.children(v))}
                for v in range(self.n)
            ]
        }
    # endregion
    ...

    # region validation
    def _link_parents(self: RootedTree) -> tuple[int | None, ...]:
        n = len(self._children)
        if n == 0:
            raise ValidationError('nodes: a tree needs at least one vertex')
        if not 0 <= self._root < n:
            raise ValidationError(f'root: unknown vertex {self._root}')

        parents: list[int | None] = [None] * n
        for v, kids in enumerate(self._children):
            for c in kids:
                if not 0 <= c < n:
                    raise ValidationError(
                        f'children of {v}: unknown vertex {c}'
                    )
                if c == self._root:
                    raise ValidationError(
                        f'children of {v}: the root {c} cannot be a child'
                    )
                if parents[c] is not None:
                    raise ValidationError(
                        f'children of {v}: vertex {c} already has '
                        f'parent {parents[c]}'
                    )
                parents[c] = v
        return tuple(parents)

    def _bfs_order(self: RootedTree) -> tuple[int, ...]:
        order = [self._root]
        queue = deque([self._root])
        while queue:
            v = queue.popleft()
            for c in self._children[v]:
                order.append(c)
                queue.append(c)
        if len(order) != len(self._children):
            unreached = sorted(set(range(self.n)) - set(order))
            raise ValidationError(
                f'nodes: vertices {unreached[:5]} are not reachable '
                f'from root {self._root} (cycle or disconnected)'
            )
        return tuple(order)

    def _check_degrees(self: RootedTree) -> None:
        for v in range(self.n):
            if self.degree(v) > self._delta:
                raise ValidationError(
                    f'vertex {v} has degree {self.degree(v)}, '
                    f'exceeding delta={self._delta}'
                )

    def recompute_subtree_sizes(self: RootedTree) -> tuple[int, ...]:
        """Recomputes subtree sizes bottom-up from the child lists."""
        sizes = [1] * self.n
        for v in reversed(self._order):
            for c in self._children[v]:
                sizes[v] += sizes[c]
        return tuple(sizes)
    # endregion
    ...

    # region properties
    @property
    def n(self: RootedTree) -> int:
        return len(self._children)

    @property
    def root(self: RootedTree) -> int:
        return self._root

    @property
    def delta(self: RootedTree) -> int:
        return self._delta

    @property
    def order(self: RootedTree) -> tuple[int, ...]:
        """Vertices in breadth-first order from the root."""
        return self._order

    @property
    def max_degree(self: RootedTree) -> int:
        return max(self.degree(v) for v in range(self.n))

    @property
    def depths(self: RootedTree) -> tuple[int, ...]:
        try:
            return self._depths
        except AttributeError:
            depths = [0] * self.n
            for v in self._order:
                for c in self._children[v]:
                    depths[c] = depths[v] + 1
            self._depths = tuple(depths)
            return self._depths

    @property
    def height(self: RootedTree) -> int:
        return max(self.depths)

    @property
    def edges(self: RootedTree) -> list[tuple[int, int]]:
        """Parent-child pairs in breadth-first order."""
        return [(v, c) for v in self._order for c in self._children[v]]
    # endregion
    ...

    def parent(self: RootedTree, v: int) -> int | None:
        return self._parents[v]

    def children(self: RootedTree, v: int) -> tuple[int, ...]:
        return self._children[v]

    def subtree_size(self: RootedTree, v: int) -> int:
        return self._sizes[v]

    def degree(self: RootedTree, v: int) -> int:
        return len(self._children[v]) + (v != self._root)

    def descendants(self: RootedTree, v: int) -> Iterator[int]:
        stack = [v]
        while stack:
            u = stack.pop()
            yield u
            stack.extend(reversed(self._children[u]))

    def __len__(self: RootedTree) -> int:
        return self.n

    def __repr__(self: RootedTree) -> str:
        return f'RootedTree(n={self.n}, root={self.root}, delta={self.delta})'


# region generators
def complete_kary(k: int, height: int) -> RootedTree:
    """Complete k-ary tree of the given height with
    (k^(height+1) - 1) / (k - 1) vertices, numbered breadth-first.
    """
    if k < 2:
        raise ValidationError(f'k must be >= 2, got {k}')
    if height < 0:
        raise ValidationError(f'height must be >= 0, got {height}')
    n = (k ** (height + 1) - 1) // (k - 1)
    children = [
        [c for c in range(k * v + 1, k * v + k + 1) if c < n]
        for v in range(n)
    ]
    return RootedTree(children)


def star(k: int) -> RootedTree:
    return complete_kary(k, 1)


def path_tree(n: int) -> RootedTree:
    if n < 1:
        raise ValidationError(f'n must be >= 1, got {n}')
    return RootedTree([[v + 1] if v + 1 < n else [] for v in range(n)])


def random_tree(n: int, delta: int, seed: int | None = None) -> RootedTree:
    """Random recursive tree with a degree cap: every new vertex attaches
    to a uniformly chosen earlier vertex that still has a free slot.
    """
    if n < 1:
        raise ValidationError(f'n must be >= 1, got {n}')
    if delta < 2:
        raise ValidationError(f'delta must be >= 2, got {delta}')
    rng = np.random.default_rng(seed)

    children: list[list[int]] = [[] for _ in range(n)]
    capacity = [delta] + [delta - 1] * (n - 1)
    open_: list[int] = [0]
    for v in range(1, n):
        slot = int(rng.integers(len(open_)))
        p = open_[slot]
        children[p].append(v)
        capacity[p] -= 1
        if capacity[p] == 0:
            open_[slot] = open_[-1]
            open_.pop()
        if capacity[v] > 0:
            open_.append(v)
    return RootedTree(children, delta=delta)


def caterpillar(n: int, delta: int) -> RootedTree:
    """A spine whose vertices carry as many legs as the degree bound
    allows; the spine continues from the first child of each spine vertex.
    """
    if n < 1:
        raise ValidationError(f'n must be >= 1, got {n}')
    if delta < 2:
        raise ValidationError(f'delta must be >= 2, got {delta}')

    children: list[list[int]] = [[]]
    spine = 0
    while len(children) < n:
        legs = delta - 1 if spine == 0 else delta - 2
        next_spine = len(children)
        children[spine].append(next_spine)
        children.append([])
        for _ in range(legs):
            if len(children) >= n:
                break
            children[spine].append(len(children))
            children.append([])
        spine = next_spine
    return RootedTree(children, delta=delta)


FAMILY_MAP: dict[str, Callable[..., RootedTree]] = {
    'complete_kary': complete_kary,
    'random': random_tree,
    'path': path_tree,
    'caterpillar': caterpillar,
    'star': star,
}


def generate_tree(family: str, **params: Any) -> RootedTree:
    """Builds a tree of the named family.

    Args:
        family (str): one of FAMILY_MAP's keys
        **params: the family's parameters (k, height, n, delta, seed)

    Returns:
        RootedTree: a validated tree
    """
    try:
        generator = FAMILY_MAP[family]
    except KeyError:
        raise ValidationError(
            f'family: unknown tree family "{family}", '
            f'expected one of {sorted(FAMILY_MAP)}'
        )
    try:
        inspect.signature(generator).bind(**params)
    except TypeError as e:
        raise ValidationError(f'{family}: {e}')
    tree = generator(**params)
    logger.debug(f'generated {family} tree {tree!r}')
    return tree
# endregion
