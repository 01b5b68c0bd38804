from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from plyforge import config
from plyforge.drawings import Drawing, Point
from plyforge.exceptions import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlyDisk:
    """
    Open disk around a vertex; its radius is alpha times the longest
    edge incident to the vertex.
    """
    vertex: int
    center: Point
    radius: float

    @property
    def area(self: PlyDisk) -> float:
        return math.pi * self.radius ** 2


@dataclass(frozen=True)
class DiskArrays:
    """Column view of a disk list for vectorised queries."""
    ids: np.ndarray
    centers: np.ndarray
    radii: np.ndarray

    @classmethod
    def of(cls: type[DiskArrays], disks: Sequence[PlyDisk]) -> DiskArrays:
        return cls(
            np.array([d.vertex for d in disks], dtype=int),
            np.array(
                [d.center.as_tuple() for d in disks], dtype=float
            ).reshape(-1, 2),
            np.array([d.radius for d in disks], dtype=float)
        )

    def __len__(self: DiskArrays) -> int:
        return len(self.radii)


def ply_disks(d: Drawing) -> list[PlyDisk]:
    """One disk per vertex with at least one incident edge, in vertex id
    order. Isolated vertices get no disk; see isolated_vertices.
    """
    longest = d.longest_incident
    disks = [
        PlyDisk(int(v), d.positions[int(v)], d.alpha * float(length))
        for v, length in zip(d.vertex_ids, longest)
        if length > 0
    ]
    skipped = len(d.vertex_ids) - len(disks)
    if skipped:
        logger.warning(f'{skipped} isolated vertices have no ply disk')
    return disks


def isolated_vertices(d: Drawing) -> list[int]:
    return [
        int(v) for v, length in zip(d.vertex_ids, d.longest_incident)
        if length == 0
    ]


def strictly_inside(
    distance: np.ndarray, radius: np.ndarray, tolerance: float
) -> np.ndarray:
    """Open-disk membership under the tolerance policy."""
    return distance < radius * (1 - tolerance)


def closed_inside(
    distance: np.ndarray, radius: np.ndarray, tolerance: float
) -> np.ndarray:
    return distance <= radius * (1 + tolerance)


def depth_at(
    q: Point, disks: Sequence[PlyDisk], tolerance: float | None = None
) -> tuple[int, list[int]]:
    """Number of open disks strictly containing q, and their vertex ids.

    Args:
        q (Point): query point
        disks (Sequence[PlyDisk]): the arrangement
        tolerance (float | None): tau; defaults to Config.TOLERANCE

    Returns:
        tuple[int, list[int]]: depth and covering vertex ids
    """
    if not disks:
        return 0, []
    tau = config.TOLERANCE if tolerance is None else tolerance
    arrays = DiskArrays.of(disks)
    offset = arrays.centers - np.array([q.x, q.y])
    inside = strictly_inside(
        np.hypot(offset[:, 0], offset[:, 1]), arrays.radii, tau
    )
    covering = sorted(int(v) for v in arrays.ids[inside])
    return len(covering), covering


def area_ratio_lower_bound(
    disks: Sequence[PlyDisk], center: Point, radius: float,
    tolerance: float | None = None
) -> float:
    """Total disk area over the area of an enclosing disk.

    The ratio is the average depth over the enclosing disk, so it never
    exceeds the ply number.

    Raises:
        ValidationError: a disk is not contained in the enclosing disk
    """
    if radius <= 0:
        raise ValidationError(f'radius: enclosing radius {radius} <= 0')
    tau = config.TOLERANCE if tolerance is None else tolerance
    total = 0.0
    for disk in disks:
        reach = disk.center.distance_to(center) + disk.radius
        if reach > radius * (1 + tau):
            raise ValidationError(
                f'disk of vertex {disk.vertex} reaches {reach}, outside '
                f'the enclosing disk of radius {radius}'
            )
        total += disk.radius ** 2
    return total / radius ** 2
