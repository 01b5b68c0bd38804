from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime as dt
from typing import Any, Sequence

import numpy as np

from plyforge import config
from plyforge.drawings import Drawing, Point
from plyforge.exceptions import GridBudgetError, ValidationError
from plyforge.ply.disks import (DiskArrays, PlyDisk, closed_inside, depth_at,
                                ply_disks, strictly_inside)

logger = logging.getLogger(__name__)

# disks closer than (r_i + r_k)(1 + slack) are neighbours
_NEIGHBOR_SLACK = 1e-3
# perturbation never exceeds this fraction of the smaller crossing disk
_LENS_CAP = 1e-3
_BLOCK = 512
_EVAL_CELLS = 4_000_000

_COMPASS = np.array([
    (np.cos(k * np.pi / 4), np.sin(k * np.pi / 4)) for k in range(8)
])


@dataclass(frozen=True)
class PlyResult:
    """
    Maximum depth of an open-disk arrangement with a point achieving it.

    closed_ply is the same maximum under closed disks (boundaries
    counted); a difference flags a tolerance-sensitive drawing.
    """
    ply: int
    witness: Point | None
    covering_set: tuple[int, ...]
    closed_ply: int
    method: str = 'exact'

    @property
    def tolerance_sensitive(self: PlyResult) -> bool:
        return self.closed_ply != self.ply

    def to_json(self: PlyResult) -> dict[str, Any]:
        return {
            'ply': self.ply,
            'witness': (
                None if self.witness is None
                else {'x': self.witness.x, 'y': self.witness.y}
            ),
            'covering_set': list(self.covering_set),
            'closed_ply': self.closed_ply,
            'method': self.method
        }


@dataclass
class _HostBest:
    depth: int = 0
    witness: tuple[float, float] | None = None
    closed: int = 0

    def offer(
        self: _HostBest, depth: int, witness: tuple[float, float]
    ) -> None:
        if self.witness is None or depth > self.depth or (
            depth == self.depth and witness < self.witness
        ):
            self.depth = depth
            self.witness = witness

    def merge(self: _HostBest, other: _HostBest) -> None:
        if other.witness is not None:
            self.offer(other.depth, other.witness)
        self.closed = max(self.closed, other.closed)


# region exact
def _neighbor_lists(
    centers: np.ndarray, radii: np.ndarray
) -> list[np.ndarray]:
    """Indices of the disks overlapping each disk (itself included)."""
    n = len(radii)
    neighbors: list[np.ndarray] = []
    for start in range(0, n, _BLOCK):
        stop = min(start + _BLOCK, n)
        diff = centers[start:stop, None, :] - centers[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        reach = (radii[start:stop, None] + radii[None, :]) * (
            1 + _NEIGHBOR_SLACK
        )
        neighbors.extend(np.flatnonzero(row) for row in dist < reach)
    return neighbors


def _unit(v: np.ndarray) -> np.ndarray:
    norm = np.hypot(v[..., 0], v[..., 1])[..., None]
    return np.divide(v, norm, out=np.zeros_like(v), where=norm > 0)


def _crossing_candidates(
    i: int, partners: np.ndarray, centers: np.ndarray, radii: np.ndarray,
    tau: float, perturbation: float
) -> tuple[np.ndarray, np.ndarray]:
    """Intersection points of circle i with each partner circle, as
    offsets from center i.

    Returns:
        tuple[np.ndarray, np.ndarray]: the exact intersection points and
            their perturbations
    """
    empty = np.zeros((0, 2))
    if not len(partners):
        return empty, empty
    e = centers[partners] - centers[i]
    d = np.hypot(e[:, 0], e[:, 1])
    ri, rj = radii[i], radii[partners]
    crossing = (
        (d > 0)
        & (d <= (ri + rj) * (1 + tau))
        & (d >= np.abs(ri - rj) * (1 - tau))
    )
    if not crossing.any():
        return empty, empty
    e, d, rj = e[crossing], d[crossing], rj[crossing]

    a = (ri ** 2 - rj ** 2 + d ** 2) / (2 * d)
    h = np.sqrt(np.maximum(ri ** 2 - a ** 2, 0.0))
    u = e / d[:, None]
    perp = np.column_stack([-u[:, 1], u[:, 0]])
    base = a[:, None] * u
    points = np.concatenate([
        base + h[:, None] * perp, base - h[:, None] * perp
    ])
    e2 = np.concatenate([e, e])
    rj2 = np.concatenate([rj, rj])

    # inward normals of both circles at the point
    ni = _unit(-points)
    nj = _unit(e2 - points)
    bisectors = np.stack([
        _unit(ni + nj), _unit(-(ni + nj)), _unit(ni - nj), _unit(nj - ni)
    ], axis=1)
    compass = np.broadcast_to(_COMPASS, (len(points), 8, 2))
    directions = np.concatenate([compass, bisectors], axis=1)
    step = np.minimum(
        perturbation * np.maximum(ri, rj2), _LENS_CAP * np.minimum(ri, rj2)
    )
    perturbed = points[:, None, :] + step[:, None, None] * directions
    return points, perturbed.reshape(-1, 2)


def _evaluate_host(
    i: int, neighbors: list[np.ndarray], centers: np.ndarray,
    radii: np.ndarray, tau: float, perturbation: float, order_key: np.ndarray
) -> _HostBest:
    """Depth of every candidate generated by disk i, measured in the
    frame of center i against the disks overlapping disk i.
    """
    local = neighbors[i]
    partners = local[order_key[local] > order_key[i]]
    exact, perturbed = _crossing_candidates(
        i, partners, centers, radii, tau, perturbation
    )
    exact = np.concatenate([np.zeros((1, 2)), exact])
    rel = centers[local] - centers[i]
    rad = radii[local]

    best = _HostBest()
    chunk = max(1, _EVAL_CELLS // max(len(local), 1))
    for points, closed in ((exact, True), (perturbed, False)):
        for start in range(0, len(points), chunk):
            q = points[start:start + chunk]
            diff = q[:, None, :] - rel[None, :, :]
            dist = np.hypot(diff[..., 0], diff[..., 1])
            depth = strictly_inside(dist, rad[None, :], tau).sum(axis=1)
            if closed:
                best.closed = max(
                    best.closed,
                    int(closed_inside(dist, rad[None, :], tau)
                        .sum(axis=1).max())
                )
            top = int(depth.max())
            if top < best.depth:
                continue
            hits = q[depth == top] + centers[i]
            first = min(map(tuple, hits.tolist()))
            best.offer(top, first)
    return best


def arrangement_ply(
    disks: Sequence[PlyDisk], tolerance: float | None = None,
    perturbation: float | None = None, threads: int | None = None
) -> PlyResult:
    """Exact maximum depth of an open-disk arrangement.

    Candidates are all disk centers and all pairwise circle intersections,
    each intersection also perturbed in the eight compass directions and
    along the bisectors of the four cells meeting there.

    Args:
        disks (Sequence[PlyDisk]): the arrangement (at least one disk)
        tolerance (float | None): tau; defaults to Config.TOLERANCE
        perturbation (float | None): delta factor; defaults to
            Config.PERTURBATION
        threads (int | None): worker cap; defaults to Config.THREADS

    Returns:
        PlyResult: ply, the lexicographically smallest witness among the
            maximum-depth candidates, and its covering set
    """
    if not disks:
        raise ValidationError('disks: ply needs at least one disk')
    tau = config.TOLERANCE if tolerance is None else tolerance
    pert = config.PERTURBATION if perturbation is None else perturbation
    workers = max(1, config.THREADS if threads is None else threads)

    _t = dt.now()
    arrays = DiskArrays.of(disks)
    centers, radii = arrays.centers, arrays.radii
    neighbors = _neighbor_lists(centers, radii)
    # each crossing pair is expanded once, by the endpoint with the
    # smaller neighbourhood
    sizes = np.array([len(nb) for nb in neighbors])
    order_key = np.empty(len(radii), dtype=float)
    order_key[np.lexsort((np.arange(len(radii)), sizes))] = np.arange(
        len(radii)
    )

    def run(hosts: range) -> _HostBest:
        acc = _HostBest()
        for i in hosts:
            acc.merge(_evaluate_host(
                i, neighbors, centers, radii, tau, pert, order_key
            ))
        return acc

    step = max(1, -(-len(radii) // (workers * 4)))
    batches = [
        range(s, min(s + step, len(radii)))
        for s in range(0, len(radii), step)
    ]
    if workers == 1:
        partials = [run(b) for b in batches]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            partials = list(executor.map(run, batches))

    best = _HostBest()
    for partial in partials:
        best.merge(partial)

    witness = Point(*best.witness)
    count, covering = depth_at(witness, disks, tolerance=tau)
    if count != best.depth:
        logger.warning(
            f'witness depth {count} differs from the local evaluation '
            f'{best.depth}; coordinates are near the precision limit'
        )
    result = PlyResult(
        count, witness, tuple(covering), max(best.closed, count), 'exact'
    )
    if result.tolerance_sensitive:
        logger.warning(
            f'tolerance-sensitive arrangement: open ply {result.ply}, '
            f'closed ply {result.closed_ply}'
        )
    logger.info(
        f'ply of {len(disks)} disks = {result.ply} '
        f'(done in {dt.now() - _t})'
    )
    return result


def ply_number_exact(
    d: Drawing, tolerance: float | None = None,
    perturbation: float | None = None, threads: int | None = None
) -> PlyResult:
    disks = ply_disks(d)
    if not disks:
        raise ValidationError('drawing: no vertex has an incident edge')
    return arrangement_ply(
        disks, tolerance=tolerance, perturbation=perturbation,
        threads=threads
    )
# endregion
...


# region sampled
Bounds = tuple[float, float, float, float]


def disk_bounds(disks: Sequence[PlyDisk]) -> Bounds:
    """Bounding box of all disks expanded by the largest radius."""
    arrays = DiskArrays.of(disks)
    pad = float(arrays.radii.max())
    low = (arrays.centers - arrays.radii[:, None]).min(axis=0) - pad
    high = (arrays.centers + arrays.radii[:, None]).max(axis=0) + pad
    return float(low[0]), float(low[1]), float(high[0]), float(high[1])


def depth_grid(
    disks: Sequence[PlyDisk], grid_step: float, bounds: Bounds | None = None,
    budget: int | None = None, tolerance: float | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Open-disk depth sampled on a regular grid.

    Args:
        disks (Sequence[PlyDisk]): the arrangement
        grid_step (float): spacing of the grid
        bounds (Bounds | None): (xmin, ymin, xmax, ymax); defaults to
            disk_bounds(disks)
        budget (int | None): maximum number of cells; defaults to
            Config.GRID_BUDGET

    Returns:
        tuple[np.ndarray, np.ndarray, np.ndarray]: xs, ys and a
            (len(ys), len(xs)) integer depth raster
    """
    if not grid_step > 0:
        raise ValidationError(f'grid_step: {grid_step} must be > 0')
    if not disks:
        raise ValidationError('disks: sampling needs at least one disk')
    tau = config.TOLERANCE if tolerance is None else tolerance
    limit = config.GRID_BUDGET if budget is None else budget
    xmin, ymin, xmax, ymax = disk_bounds(disks) if bounds is None else bounds

    nx = int(np.floor((xmax - xmin) / grid_step)) + 1
    ny = int(np.floor((ymax - ymin) / grid_step)) + 1
    if nx * ny > limit:
        raise GridBudgetError(
            f'grid_step: {nx} x {ny} = {nx * ny} cells exceed the budget '
            f'of {limit}; use a coarser grid_step'
        )
    xs = xmin + grid_step * np.arange(nx)
    ys = ymin + grid_step * np.arange(ny)
    depth = np.zeros((ny, nx), dtype=np.int32)

    for disk in disks:
        cx, cy, r = disk.center.x, disk.center.y, disk.radius
        x0, x1 = np.searchsorted(xs, [cx - r, cx + r], side='left')
        y0, y1 = np.searchsorted(ys, [cy - r, cy + r], side='left')
        if x0 >= x1 or y0 >= y1:
            continue
        dx = xs[x0:x1][None, :] - cx
        dy = ys[y0:y1][:, None] - cy
        depth[y0:y1, x0:x1] += strictly_inside(
            np.hypot(dx, dy), np.float64(r), tau
        )
    return xs, ys, depth


def arrangement_ply_sampled(
    disks: Sequence[PlyDisk], grid_step: float, budget: int | None = None,
    tolerance: float | None = None
) -> int:
    _t = dt.now()
    _, _, depth = depth_grid(
        disks, grid_step, budget=budget, tolerance=tolerance
    )
    logger.info(
        f'sampled {depth.size} cells at step {grid_step} '
        f'(done in {dt.now() - _t})'
    )
    return int(depth.max())


def ply_number_sampled(
    d: Drawing, grid_step: float, budget: int | None = None,
    tolerance: float | None = None
) -> int:
    """Max depth over a regular grid; never exceeds ply_number_exact."""
    disks = ply_disks(d)
    if not disks:
        return 0
    return arrangement_ply_sampled(
        disks, grid_step, budget=budget, tolerance=tolerance
    )
# endregion
