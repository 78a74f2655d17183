from .mesh import (
    MeshError,
    SkinnedMesh,
    StaticMesh,
    TaggedTriangleSet,
    load_skinned_mesh,
    load_skinned_mesh_file,
    load_static_mesh,
    load_static_mesh_file,
    skin_mesh,
)
from .bvh import Bvh, build_bvh, point_visibility, ray_nearest_hit
from .raster import InstanceBuffer, mask_of, rasterize_instances, shade_pixels, visible_bbox

__all__ = [
    "MeshError",
    "SkinnedMesh",
    "StaticMesh",
    "TaggedTriangleSet",
    "load_skinned_mesh",
    "load_skinned_mesh_file",
    "load_static_mesh",
    "load_static_mesh_file",
    "skin_mesh",
    "Bvh",
    "build_bvh",
    "ray_nearest_hit",
    "point_visibility",
    "InstanceBuffer",
    "rasterize_instances",
    "mask_of",
    "visible_bbox",
    "shade_pixels",
]
