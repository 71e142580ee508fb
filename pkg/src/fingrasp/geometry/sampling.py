"""Surface sampling of triangle meshes and normal recovery for raw clouds."""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from ..errors import FingraspError, MeshFormatError
from .cloud import SurfacePointCloud
from .meshio import TriangleMesh, load_mesh, load_ply

_DEGENERATE_AREA = 1e-16


def sample_mesh(mesh: TriangleMesh, n: int, seed: int) -> SurfacePointCloud:
    """Area-weighted uniform sampling of a triangle mesh into a surface cloud.

    Normals come from the triangle planes in winding order, then the whole
    set is flipped if the area-weighted majority points toward the mesh
    centroid rather than away from it. Deterministic for a fixed seed.
    """
    if n < 1:
        raise FingraspError("sample count must be >= 1")
    v, f = mesh.vertices, mesh.faces
    e1 = v[f[:, 1]] - v[f[:, 0]]
    e2 = v[f[:, 2]] - v[f[:, 0]]
    cross = np.cross(e1, e2)
    areas = 0.5 * np.linalg.norm(cross, axis=1)
    valid = areas > _DEGENERATE_AREA
    if not valid.any():
        raise FingraspError("mesh has no non-degenerate triangles")
    tri_normals = np.zeros_like(cross)
    tri_normals[valid] = cross[valid] / (2.0 * areas[valid][:, None])

    centroid = v.mean(axis=0)
    tri_centers = (v[f[:, 0]] + v[f[:, 1]] + v[f[:, 2]]) / 3.0
    vote = np.sum(areas[valid] * np.sign(
        np.einsum("ij,ij->i", tri_normals[valid], tri_centers[valid] - centroid)
    ))
    if vote < 0:
        tri_normals = -tri_normals

    rng = np.random.default_rng(seed)
    probs = np.where(valid, areas, 0.0)
    probs = probs / probs.sum()
    tri = rng.choice(len(f), size=n, p=probs)
    u = rng.random(n)
    w = rng.random(n)
    flip = u + w > 1.0
    u[flip] = 1.0 - u[flip]
    w[flip] = 1.0 - w[flip]
    pts = v[f[tri, 0]] + u[:, None] * e1[tri] + w[:, None] * e2[tri]
    return SurfacePointCloud(pts, tri_normals[tri])


_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


def sample_spherical_cap(center, radius: float, axis, half_angle: float, n: int) -> SurfacePointCloud:
    """Deterministic Fibonacci-spiral sampling of a spherical cap.

    Points lie on the sphere of ``radius`` about ``center`` within
    ``half_angle`` of ``axis``; normals are the outward radial directions.
    """
    if n < 1:
        raise FingraspError("cap sample count must be >= 1")
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    k = np.arange(n)
    cos_t = 1.0 - (1.0 - np.cos(half_angle)) * (k + 0.5) / n
    sin_t = np.sqrt(np.clip(1.0 - cos_t**2, 0.0, None))
    phi = k * _GOLDEN_ANGLE
    local = np.column_stack([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t])
    # orthonormal frame with axis as its z
    seed_vec = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(axis, seed_vec)
    u /= np.linalg.norm(u)
    v = np.cross(axis, u)
    dirs = local @ np.vstack([u, v, axis])
    return SurfacePointCloud(np.asarray(center, float) + radius * dirs, dirs)


def estimate_normals(points: np.ndarray, k: int = 15) -> np.ndarray:
    """Per-point normals from a local PCA plane fit, oriented away from the centroid."""
    points = np.asarray(points, dtype=float)
    if len(points) < 3:
        raise FingraspError("need at least 3 points to estimate normals")
    k = min(k, len(points))
    tree = cKDTree(points)
    _, nbr = tree.query(points, k=k)
    centroid = points.mean(axis=0)
    normals = np.empty_like(points)
    for i, idx in enumerate(np.atleast_2d(nbr)):
        local = points[idx] - points[idx].mean(axis=0)
        _, _, vt = np.linalg.svd(local, full_matrices=False)
        nrm = vt[-1]
        if nrm @ (points[i] - centroid) < 0:
            nrm = -nrm
        normals[i] = nrm
    lengths = np.linalg.norm(normals, axis=1, keepdims=True)
    return normals / np.where(lengths > 0, lengths, 1.0)


def load_object_cloud(path, n_points: int, seed: int) -> SurfacePointCloud:
    """Load an object file as a surface cloud.

    OBJ and PLY meshes are sampled to ``n_points``; PLY point clouds are used
    as-is, with normals estimated when the file carries none.
    """
    from pathlib import Path

    suffix = Path(path).suffix.lower()
    if suffix == ".obj":
        return sample_mesh(load_mesh(path), n_points, seed)
    if suffix != ".ply":
        raise MeshFormatError(path, f"unsupported object format {suffix!r}")
    pts, normals, faces = load_ply(path)
    if faces is not None and len(faces) > 0:
        return sample_mesh(TriangleMesh(pts, faces), n_points, seed)
    if normals is None:
        normals = estimate_normals(pts)
    else:
        lengths = np.linalg.norm(normals, axis=1, keepdims=True)
        normals = normals / np.where(lengths > 1e-12, lengths, 1.0)
        bad = (lengths < 1e-12).ravel()
        if bad.any():
            normals[bad] = estimate_normals(pts)[bad]
    return SurfacePointCloud(pts, normals)
