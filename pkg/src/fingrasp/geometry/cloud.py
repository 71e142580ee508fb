"""Surface point clouds with outward normals and nearest-neighbor queries."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ..errors import FingraspError
from .rigid import RigidTransform


def _freeze(a: np.ndarray, shape_tail) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=float)
    if out.ndim != 2 or out.shape[1:] != shape_tail:
        raise ValueError(f"expected (N, {shape_tail[0]}) array, got {out.shape}")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SurfacePointCloud:
    """Points plus outward unit normals; immutable once built.

    `center_of_mass` defaults to the arithmetic mean of the points and may be
    overridden when the source file provides one.
    """

    points: np.ndarray
    normals: np.ndarray
    center_of_mass: np.ndarray = None
    _tree: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        pts = _freeze(self.points, (3,))
        nrm = _freeze(self.normals, (3,))
        if len(pts) < 1:
            raise FingraspError("empty point cloud")
        if len(pts) != len(nrm):
            raise FingraspError(f"{len(pts)} points but {len(nrm)} normals")
        lengths = np.linalg.norm(nrm, axis=1)
        if np.abs(lengths - 1.0).max() > 1e-6:
            raise FingraspError("normals must be unit length")
        com = self.center_of_mass
        com = pts.mean(axis=0) if com is None else np.asarray(com, dtype=float)
        com = np.ascontiguousarray(com)
        com.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "normals", nrm)
        object.__setattr__(self, "center_of_mass", com)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def tree(self) -> cKDTree:
        """KD-tree over the points, built on first use."""
        if self._tree is None:
            object.__setattr__(self, "_tree", cKDTree(self.points))
        return self._tree

    def transformed(self, tf: RigidTransform) -> "SurfacePointCloud":
        return SurfacePointCloud(
            tf.apply(self.points), tf.rotate(self.normals), tf.apply(self.center_of_mass)
        )


def nearest_neighbors(cloud: SurfacePointCloud, queries: np.ndarray, exact_ties: bool = True):
    """Index and distance of the closest cloud point for each query.

    Ties are broken toward the lowest point index when ``exact_ties`` is set
    (the default); the fast path leaves tie order up to the tree and is meant
    for mean-aggregated uses where tie identity cannot matter.
    Returns ``(indices, distances)`` as arrays matching the query count.
    """
    q = np.atleast_2d(np.asarray(queries, dtype=float))
    dist, idx = cloud.tree.query(q)
    if exact_ties and len(cloud) > 1:
        # Re-pick the lowest index among all points at the minimal distance.
        for k, (d, i) in enumerate(zip(dist, idx)):
            ball = cloud.tree.query_ball_point(q[k], d * (1.0 + 1e-12) + 1e-300)
            if len(ball) > 1:
                cands = [j for j in ball if np.linalg.norm(cloud.points[j] - q[k]) <= d]
                if cands:
                    idx[k] = min(cands)
    return idx, dist
