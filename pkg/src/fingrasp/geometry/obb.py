"""Oriented bounding boxes used as the per-link collision proxy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rigid import RigidTransform


@dataclass(frozen=True)
class OrientedBoundingBox:
    """Box with pose ``frame`` and positive ``half_extents`` along its local axes."""

    frame: RigidTransform
    half_extents: np.ndarray

    def __post_init__(self):
        he = np.ascontiguousarray(self.half_extents, dtype=float)
        if he.shape != (3,) or not np.all(he > 0):
            raise ValueError("half_extents must be three positive lengths")
        he.setflags(write=False)
        object.__setattr__(self, "half_extents", he)

    def transformed(self, tf: RigidTransform) -> "OrientedBoundingBox":
        return OrientedBoundingBox(tf @ self.frame, self.half_extents)

    def to_local(self, points: np.ndarray) -> np.ndarray:
        return self.frame.inverse().apply(points)

    def contains(self, points: np.ndarray, margin: float = 0.0) -> np.ndarray:
        """Boolean mask of points inside the box enlarged by ``margin`` per face."""
        local = np.atleast_2d(self.to_local(points))
        return np.all(np.abs(local) <= self.half_extents + margin, axis=1)

    def corners(self) -> np.ndarray:
        """The 8 corner points in world coordinates."""
        signs = np.array(
            [[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)], dtype=float
        )
        return self.frame.apply(signs * self.half_extents)
