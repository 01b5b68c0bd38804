from __future__ import annotations

import math
from collections import deque
from typing import Any

from plyforge.trees import RootedTree


class HeavyPathDecomposition:
    """
    Partition of a tree into heavy paths.

    Every path starts at the root or at a light child and follows the
    child with the largest subtree (ties go to the smallest id) down to a
    leaf. A path P is anchored at the parent of its first vertex; the
    path containing that anchor is P's parent in the decomposition tree.
    Paths are numbered breadth-first over the decomposition tree, so path
    0 is the root path and heights never decrease with the index.
    """

    def __init__(self: HeavyPathDecomposition, tree: RootedTree) -> None:
        self._tree = tree
        self._decompose()

    def _heavy_child(self: HeavyPathDecomposition, v: int) -> int | None:
        kids = self._tree.children(v)
        if not kids:
            return None
        return max(kids, key=lambda c: (self._tree.subtree_size(c), -c))

    def _decompose(self: HeavyPathDecomposition) -> None:
        tree = self._tree
        paths: list[tuple[int, ...]] = []
        anchors: list[int | None] = []
        heights: list[int] = []
        path_of = [-1] * tree.n
        anchored: list[list[int]] = [[] for _ in range(tree.n)]

        queue: deque[tuple[int, int | None, int]] = deque(
            [(tree.root, None, 0)]
        )
        while queue:
            start, anchor, height = queue.popleft()
            index = len(paths)
            if anchor is not None:
                anchored[anchor].append(index)

            path = []
            v: int | None = start
            while v is not None:
                path.append(v)
                path_of[v] = index
                heavy = self._heavy_child(v)
                for c in tree.children(v):
                    if c != heavy:
                        queue.append((c, v, height + 1))
                v = heavy

            paths.append(tuple(path))
            anchors.append(anchor)
            heights.append(height)

        self._paths = tuple(paths)
        self._anchors = tuple(anchors)
        self._heights = tuple(heights)
        self._path_of = tuple(path_of)
        self._anchored = tuple(tuple(a) for a in anchored)

    # region properties
    @property
    def tree(self: HeavyPathDecomposition) -> RootedTree:
        return self._tree

    @property
    def paths(self: HeavyPathDecomposition) -> tuple[tuple[int, ...], ...]:
        return self._paths

    @property
    def heights(self: HeavyPathDecomposition) -> tuple[int, ...]:
        return self._heights

    @property
    def total_height(self: HeavyPathDecomposition) -> int:
        return max(self._heights)

    @property
    def anchored_subtree_size(self: HeavyPathDecomposition) -> tuple[int, ...]:
        """n_i for every vertex: total size of the subtrees anchored at it."""
        try:
            return self._anchored_sizes
        except AttributeError:
            self._anchored_sizes = tuple(
                sum(
                    self._tree.subtree_size(self._paths[p][0])
                    for p in self._anchored[v]
                )
                for v in range(self._tree.n)
            )
            return self._anchored_sizes

    @property
    def height_bound(self: HeavyPathDecomposition) -> float:
        """log2(n) + 1, the bound every decomposition height respects."""
        return math.log2(self._tree.n) + 1
    # endregion
    ...

    def anchor(self: HeavyPathDecomposition, path: int) -> int | None:
        return self._anchors[path]

    def path_of(self: HeavyPathDecomposition, v: int) -> int:
        return self._path_of[v]

    def parent_path(self: HeavyPathDecomposition, path: int) -> int | None:
        anchor = self._anchors[path]
        return None if anchor is None else self._path_of[anchor]

    def anchored_paths(
        self: HeavyPathDecomposition, v: int
    ) -> tuple[int, ...]:
        """Indices of the paths anchored at v, in child order."""
        return self._anchored[v]

    def to_json(self: HeavyPathDecomposition) -> dict[str, Any]:
        return {
            'total_height': self.total_height,
            'paths': [
                {
                    'index': i,
                    'vertices': list(path),
                    'anchor': self._anchors[i],
                    'height': self._heights[i],
                    'anchored_subtree_size': [
                        self.anchored_subtree_size[v] for v in path
                    ]
                }
                for i, path in enumerate(self._paths)
            ]
        }

    def __repr__(self: HeavyPathDecomposition) -> str:
        return (
            f'HeavyPathDecomposition(paths={len(self._paths)}, '
            f'H={self.total_height})'
        )


def heavy_path_decompose(tree: RootedTree) -> HeavyPathDecomposition:
    return HeavyPathDecomposition(tree)
