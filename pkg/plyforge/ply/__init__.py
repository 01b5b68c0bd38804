from plyforge.ply.disks import (DiskArrays, PlyDisk, area_ratio_lower_bound,
                                depth_at, isolated_vertices, ply_disks)
from plyforge.ply.engine import (PlyResult, arrangement_ply,
                                 arrangement_ply_sampled, depth_grid,
                                 disk_bounds, ply_number_exact,
                                 ply_number_sampled)

__all__ = [
    'DiskArrays', 'PlyDisk', 'PlyResult', 'area_ratio_lower_bound',
    'arrangement_ply', 'arrangement_ply_sampled', 'depth_at', 'depth_grid',
    'disk_bounds', 'isolated_vertices', 'ply_disks', 'ply_number_exact',
    'ply_number_sampled',
]
