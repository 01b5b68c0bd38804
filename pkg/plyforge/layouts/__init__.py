from plyforge.layouts.logply import (AreaStats, HeavyPathAssembler,
                                     HeavyPathLayout, LayerSchedule,
                                     PathLayout, area_growth, area_stats,
                                     assemble_heavy_path_drawing, draw_path,
                                     heavy_path_layout, layered_star_layout,
                                     layered_tree_layout)
from plyforge.layouts.oneply import (OnePlyParams, compute_alpha_max,
                                     compute_f, layout_one_ply,
                                     one_ply_params)

__all__ = [
    'AreaStats', 'HeavyPathAssembler', 'HeavyPathLayout', 'LayerSchedule',
    'OnePlyParams', 'PathLayout', 'area_growth', 'area_stats',
    'assemble_heavy_path_drawing', 'compute_alpha_max', 'compute_f',
    'draw_path', 'heavy_path_layout', 'layered_star_layout',
    'layered_tree_layout', 'layout_one_ply', 'one_ply_params',
]
