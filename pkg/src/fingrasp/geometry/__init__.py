"""Geometry primitives: rigid transforms, clouds, boxes, mesh I/O, sampling."""

from .cloud import SurfacePointCloud, nearest_neighbors
from .clustering import kmeans
from .meshio import (
    TriangleMesh,
    load_mesh,
    load_ply,
    load_point_cloud,
    save_mesh_obj,
    save_mesh_ply,
    save_point_cloud_ply,
)
from .obb import OrientedBoundingBox
from .rigid import RigidTransform, is_rotation_matrix, so3_exp, so3_hat
from .sampling import estimate_normals, load_object_cloud, sample_mesh

__all__ = [
    "SurfacePointCloud",
    "nearest_neighbors",
    "kmeans",
    "TriangleMesh",
    "load_mesh",
    "load_ply",
    "load_point_cloud",
    "save_mesh_obj",
    "save_mesh_ply",
    "save_point_cloud_ply",
    "OrientedBoundingBox",
    "RigidTransform",
    "is_rotation_matrix",
    "so3_exp",
    "so3_hat",
    "estimate_normals",
    "load_object_cloud",
    "sample_mesh",
]
