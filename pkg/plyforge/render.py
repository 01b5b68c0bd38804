from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Any

import numpy as np
from jinja2 import Environment, FileSystemLoader, select_autoescape

from plyforge.drawings import Drawing
from plyforge.exceptions import ValidationError
from plyforge.ply.disks import DiskArrays, ply_disks
from plyforge.ply.engine import depth_grid

logger = logging.getLogger(__name__)

TEMPLATE_DIR = os.path.join(os.path.dirname(__file__), 'templates')
MARGIN = 0.05

_env = Environment(
    loader=FileSystemLoader(TEMPLATE_DIR),
    autoescape=select_autoescape(['svg.jinja']),
    trim_blocks=True,
    lstrip_blocks=True
)


@dataclass(frozen=True)
class RenderOptions:
    show_ply_disks: bool = True
    show_edges: bool = True
    stroke_width: float = 1.0
    canvas_size: float = 800.0
    highlight_overlaps: bool = False
    # overlap raster cells along the longer side
    overlap_resolution: int = 200

    def __post_init__(self: RenderOptions) -> None:
        if not self.canvas_size > 0:
            raise ValidationError(
                f'canvas_size: {self.canvas_size} must be > 0'
            )
        if not self.stroke_width > 0:
            raise ValidationError(
                f'stroke_width: {self.stroke_width} must be > 0'
            )
        if self.overlap_resolution < 1:
            raise ValidationError(
                f'overlap_resolution: {self.overlap_resolution} must be >= 1'
            )


def _fmt(x: float) -> str:
    return f'{x:.3f}'


class _Canvas:
    """Maps drawing coordinates onto the SVG canvas (y pointing down)."""

    def __init__(
        self: _Canvas, bounds: tuple[float, float, float, float], size: float
    ) -> None:
        xmin, ymin, xmax, ymax = bounds
        span = max(xmax - xmin, ymax - ymin)
        if span <= 0:
            span = 1.0
        pad = span * MARGIN
        self.xmin, self.ymax = xmin - pad, ymax + pad
        self.k = size / (span + 2 * pad)
        self.width = (xmax - xmin + 2 * pad) * self.k
        self.height = (ymax - ymin + 2 * pad) * self.k

    def x(self: _Canvas, x: float) -> str:
        return _fmt((x - self.xmin) * self.k)

    def y(self: _Canvas, y: float) -> str:
        return _fmt((self.ymax - y) * self.k)

    def length(self: _Canvas, r: float) -> str:
        return _fmt(r * self.k)


def _bounds(d: Drawing, disks: DiskArrays | None) -> tuple[float, ...]:
    if disks is not None and len(disks):
        low = (disks.centers - disks.radii[:, None]).min(axis=0)
        high = (disks.centers + disks.radii[:, None]).max(axis=0)
    elif len(d.vertex_ids):
        low = d.coordinates.min(axis=0)
        high = d.coordinates.max(axis=0)
    else:
        return (0.0, 0.0, 1.0, 1.0)
    return float(low[0]), float(low[1]), float(high[0]), float(high[1])


def _overlap_rects(
    d: Drawing, canvas: _Canvas, bounds: tuple[float, ...],
    opts: RenderOptions
) -> list[dict[str, str]]:
    """Horizontal runs of raster cells covered by two or more disks."""
    disks = ply_disks(d)
    if not disks:
        return []
    xmin, ymin, xmax, ymax = bounds
    step = max(xmax - xmin, ymax - ymin) / opts.overlap_resolution
    if step <= 0:
        return []
    xs, ys, depth = depth_grid(disks, step, bounds=bounds)
    rects = []
    for row, y in enumerate(ys):
        hot = np.flatnonzero(depth[row] >= 2)
        if not len(hot):
            continue
        breaks = np.flatnonzero(np.diff(hot) > 1)
        starts = np.concatenate([[hot[0]], hot[breaks + 1]])
        stops = np.concatenate([hot[breaks], [hot[-1]]])
        for a, b in zip(starts, stops):
            rects.append({
                'x': canvas.x(xs[a] - step / 2),
                'y': canvas.y(y + step / 2),
                'w': canvas.length((b - a + 1) * step),
                'h': canvas.length(step)
            })
    logger.debug(f'{len(rects)} overlap runs at step {step:.3g}')
    return rects


def render_svg(d: Drawing, opts: RenderOptions | None = None) -> str:
    """SVG document of a drawing: ply disks (one circle each), edges as
    lines and vertices as round dots.

    Args:
        d (Drawing): the drawing
        opts (RenderOptions | None): what to show; defaults apply if None

    Returns:
        str: the SVG text
    """
    opts = opts or RenderOptions()
    disks = ply_disks(d)
    arrays = DiskArrays.of(disks) if disks else None
    bounds = _bounds(d, arrays)
    canvas = _Canvas(bounds, opts.canvas_size)
    p = d.positions

    context: dict[str, Any] = {
        'title': d.meta.get('algorithm', 'drawing'),
        'width': _fmt(canvas.width),
        'height': _fmt(canvas.height),
        'stroke': _fmt(opts.stroke_width),
        'dot': _fmt(opts.stroke_width * 4),
        'disks': [
            {
                'vertex': disk.vertex,
                'x': canvas.x(disk.center.x),
                'y': canvas.y(disk.center.y),
                'r': canvas.length(disk.radius)
            }
            for disk in disks
        ] if opts.show_ply_disks else [],
        'edges': [
            {
                'x1': canvas.x(p[a].x), 'y1': canvas.y(p[a].y),
                'x2': canvas.x(p[b].x), 'y2': canvas.y(p[b].y)
            }
            for a, b in d.edges
        ] if opts.show_edges else [],
        'vertices': [
            {'vertex': int(v), 'x': canvas.x(p[int(v)].x),
             'y': canvas.y(p[int(v)].y)}
            for v in d.vertex_ids
        ],
        'overlaps': (
            _overlap_rects(d, canvas, bounds, opts)
            if opts.highlight_overlaps else []
        )
    }
    return _env.get_template('drawing.svg.jinja').render(**context)
