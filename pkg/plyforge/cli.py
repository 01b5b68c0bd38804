from __future__ import annotations

import logging
import logging.config
import os
import sys
from typing import Any, Sequence

import click
import numpy as np

from plyforge import config
from plyforge.decomposition import heavy_path_decompose
from plyforge.drawings import Drawing
from plyforge.exceptions import InputError, PlyforgeError, ValidationError
from plyforge.fileio import (load_drawing, load_instance, load_tree,
                             read_json, write_json, write_text)
from plyforge.layouts.logply import (SCALINGS, heavy_path_layout,
                                     layered_tree_layout)
from plyforge.layouts.oneply import layout_one_ply, one_ply_params
from plyforge.lowerbound import (LowerBoundInstance, apex_layout,
                                 build_instance, build_instance_from_params,
                                 certify_lower_bound, STRATEGY_MAP)
from plyforge.ply.disks import ply_disks
from plyforge.ply.engine import depth_grid, ply_number_exact
from plyforge.render import RenderOptions, render_svg
from plyforge.trees import FAMILY_MAP, generate_tree

logger = logging.getLogger(__name__)

# parameters each tree family takes from the command line
FAMILY_PARAMS: dict[str, tuple[str, ...]] = {
    'complete_kary': ('k', 'height'),
    'star': ('k',),
    'path': ('n',),
    'random': ('n', 'delta', 'seed'),
    'caterpillar': ('n', 'delta'),
}
ALGORITHMS = ('oneply', 'layered', 'heavypath', 'apex')


def configure_logging() -> None:
    if os.path.exists(config.LOGGING_INI):
        logging.config.fileConfig(
            config.LOGGING_INI, disable_existing_loggers=False
        )
    else:
        logging.basicConfig(
            level=logging.INFO,
            format='%(levelname)-5.5s [%(name)s] %(message)s'
        )


@click.group()
@click.option('-q', '--quiet', is_flag=True, help='Only log warnings.')
def cli(quiet: bool) -> None:
    """Low-ply tree drawings: layouts, ply numbers and lower bounds."""
    if quiet:
        logging.getLogger('plyforge').setLevel(logging.WARNING)


# region generate
@cli.command()
@click.option(
    '--family', required=True,
    type=click.Choice(sorted(FAMILY_MAP) + ['lowerbound'])
)
@click.option('--k', type=int, help='Branching factor.')
@click.option('--height', type=int, help='Tree height.')
@click.option('--n', type=int, help='Vertex count (or n_target).')
@click.option('--delta', type=int, help='Degree bound.')
@click.option('--h', 'h_', type=int, help='Lower-bound tree height.')
@click.option('--m', 'm_', type=int, help='Lower-bound tree count.')
@click.option('--seed', type=int, default=None)
@click.option('--out', type=click.Path(dir_okay=False), default=None)
def generate(
    family: str, k: int | None, height: int | None, n: int | None,
    delta: int | None, h_: int | None, m_: int | None, seed: int | None,
    out: str | None
) -> None:
    """Emit a tree (or lower-bound instance) as JSON."""
    if family == 'lowerbound':
        if h_ is not None and m_ is not None:
            instance = build_instance_from_params(h_, m_, n_target=n or 0)
        elif n is not None:
            instance = build_instance(n)
        else:
            raise ValidationError('n: lowerbound needs --n or --h and --m')
        write_json(instance.to_json(), out)
        return

    given = {'k': k, 'height': height, 'n': n, 'delta': delta, 'seed': seed}
    params: dict[str, Any] = {}
    for name in FAMILY_PARAMS[family]:
        if given[name] is None and name != 'seed':
            raise ValidationError(f'{name}: required for family {family}')
        params[name] = given[name]
    write_json(generate_tree(family, **params).to_json(), out)
# endregion
...


# region layout
@cli.command()
@click.argument('source', type=click.Path(dir_okay=False))
@click.option(
    '--algorithm', type=click.Choice(ALGORITHMS), default='oneply'
)
@click.option('--delta', type=int, default=None)
@click.option('--manhattan', is_flag=True)
@click.option('--alpha', type=float, default=None)
@click.option('--root-edge', type=float, default=1.0)
@click.option('--scaling', type=click.Choice(SCALINGS), default='measured')
@click.option(
    '--strategy', type=click.Choice(sorted(STRATEGY_MAP)),
    default='radial_trees'
)
@click.option('--seed', type=int, default=None)
@click.option('--out', type=click.Path(dir_okay=False), default=None)
def layout(
    source: str, algorithm: str, delta: int | None, manhattan: bool,
    alpha: float | None, root_edge: float, scaling: str, strategy: str,
    seed: int | None, out: str | None
) -> None:
    """Lay out a tree (or, for apex, a lower-bound instance)."""
    if algorithm == 'apex':
        instance = load_instance(source)
        drawing = apex_layout(
            instance, strategy, seed=seed,
            alpha=0.5 if alpha is None else alpha
        )
        write_json(drawing.to_json(), out)
        return

    tree = load_tree(source)
    if algorithm == 'oneply':
        params = one_ply_params(
            tree.delta if delta is None else delta, manhattan, alpha
        )
        drawing = layout_one_ply(tree, params, root_edge)
    elif algorithm == 'layered':
        drawing = layered_tree_layout(tree, root_edge)
    else:
        drawing = heavy_path_layout(tree, scaling).drawing
    if alpha is not None and algorithm != 'oneply':
        drawing = drawing.with_alpha(alpha)
    write_json(drawing.to_json(), out)
# endregion
...


# region ply
@cli.command()
@click.argument('source', type=click.Path(dir_okay=False))
@click.option(
    '--method', type=click.Choice(['exact', 'sampled']), default='exact'
)
@click.option('--grid-step', type=float, default=None)
@click.option('--threads', type=int, default=None)
@click.option('--out', type=click.Path(dir_okay=False), default=None)
def ply(
    source: str, method: str, grid_step: float | None,
    threads: int | None, out: str | None
) -> None:
    """Ply number of a drawing."""
    drawing = load_drawing(source)
    if method == 'exact':
        result = ply_number_exact(drawing, threads=threads)
        report = result.to_json()
        report['witness'] = [result.witness.x, result.witness.y]
        write_json(report, out)
        return

    disks = ply_disks(drawing)
    if not disks:
        write_json({'ply': 0, 'witness': None, 'method': 'sampled'}, out)
        return
    if grid_step is None:
        grid_step = min(disk.radius for disk in disks) / 50
    xs, ys, depth = depth_grid(disks, grid_step)
    row, col = np.unravel_index(int(np.argmax(depth)), depth.shape)
    write_json({
        'ply': int(depth[row, col]),
        'witness': [float(xs[col]), float(ys[row])],
        'method': 'sampled',
        'grid_step': grid_step
    }, out)
# endregion
...


# region bound
@cli.command()
@click.option(
    '--certify', 'drawing_path', type=click.Path(dir_okay=False),
    default=None, help='Drawing of a lower-bound instance.'
)
@click.option(
    '--instance', 'instance_path', type=click.Path(dir_okay=False),
    default=None
)
@click.option('--n', type=int, default=None, help='n_target of the instance.')
@click.option('--alpha', type=float, default=None)
@click.option('--out', type=click.Path(dir_okay=False), default=None)
def bound(
    drawing_path: str | None, instance_path: str | None, n: int | None,
    alpha: float | None, out: str | None
) -> None:
    """Certify a ply lower bound, or describe an instance."""
    instance: LowerBoundInstance | None = None
    if instance_path is not None:
        instance = load_instance(instance_path)
    elif n is not None:
        instance = build_instance(n)

    if drawing_path is None:
        if instance is None:
            raise ValidationError(
                'n: bound needs --certify, --instance or --n'
            )
        write_json({
            'n_target': instance.n_target,
            'h': instance.h,
            'm': instance.m,
            'vertices': instance.vertex_count
        }, out)
        return

    data = read_json(drawing_path)
    if instance is None:
        meta = data.get('meta', {}) if isinstance(data, dict) else {}
        if 'h' not in meta or 'm' not in meta:
            raise ValidationError(
                'instance: pass --instance or --n, the drawing does not '
                'record h and m'
            )
        instance = build_instance_from_params(int(meta['h']), int(meta['m']))
    certificate = certify_lower_bound(
        Drawing.from_json(data), instance, alpha
    )
    write_json(certificate.to_json(), out)
# endregion
...


@cli.command()
@click.argument('source', type=click.Path(dir_okay=False))
@click.option('--out', type=click.Path(dir_okay=False), default=None)
def decompose(source: str, out: str | None) -> None:
    """Heavy-path decomposition of a tree."""
    write_json(heavy_path_decompose(load_tree(source)).to_json(), out)


@cli.command()
@click.argument('source', type=click.Path(dir_okay=False))
@click.option('--show-ply-disks/--hide-ply-disks', default=True)
@click.option('--show-edges/--hide-edges', default=True)
@click.option('--highlight-overlaps', is_flag=True)
@click.option('--canvas-size', type=float, default=800.0)
@click.option('--stroke-width', type=float, default=1.0)
@click.option('--out', type=click.Path(dir_okay=False), default=None)
def render(
    source: str, show_ply_disks: bool, show_edges: bool,
    highlight_overlaps: bool, canvas_size: float, stroke_width: float,
    out: str | None
) -> None:
    """Render a drawing as SVG."""
    opts = RenderOptions(
        show_ply_disks=show_ply_disks, show_edges=show_edges,
        stroke_width=stroke_width, canvas_size=canvas_size,
        highlight_overlaps=highlight_overlaps
    )
    write_text(render_svg(load_drawing(source), opts), out)


def cli_main(argv: Sequence[str] | None = None) -> int:
    """Runs the command line and maps failures onto exit statuses:
    1 for invalid input, 2 for unreadable or unwritable files.
    """
    configure_logging()
    try:
        rv = cli.main(
            args=list(sys.argv[1:] if argv is None else argv),
            prog_name='plyforge', standalone_mode=False
        )
    except click.ClickException as e:
        click.echo(f'error: {e.format_message()}', err=True)
        return 1
    except click.Abort:
        return 1
    except (InputError, OSError) as e:
        click.echo(f'error: {e}', err=True)
        return 2
    except PlyforgeError as e:
        click.echo(f'error: {e}', err=True)
        return 1
    return rv if isinstance(rv, int) else 0
