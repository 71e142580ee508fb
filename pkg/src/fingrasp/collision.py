"""Approximate hand-object and hand-ground collision detection.

Object points are tested against the per-link bounding boxes (enlarged by a
small margin so near-contact is penalized before penetration). Each included
object point is paired with the nearest hand point on that link. A link whose
pairs lie, on balance, in front of the hand surface is an outer-side contact:
its hand points are re-projected onto the opposite box face so the penalty
pushes the link out the short way. Ground collision pairs every hand point
below z = 0 with its vertical foot point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .geometry import SurfacePointCloud
from .hand_model import PosedHand

DEFAULT_BOX_MARGIN = 0.002
GROUND_NORMAL = np.array([0.0, 0.0, 1.0])

INNER = "inner"
OUTER = "outer"


@dataclass(frozen=True)
class CollisionSet:
    """Hand-object pairs plus hand-ground pairs, in deterministic order."""

    # object part, sorted by (link id, object index)
    p: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    n_p: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    o: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    link: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    obj_index: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    side: tuple = ()
    # ground part
    p_g: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    o_g: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    link_g: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def n_object_pairs(self) -> int:
        return len(self.o)

    @property
    def n_ground_pairs(self) -> int:
        return len(self.o_g)

    @property
    def total_pairs(self) -> int:
        return self.n_object_pairs + self.n_ground_pairs

    def merged(self, other: "CollisionSet") -> "CollisionSet":
        """Combine the object part of self with the ground part of other."""
        return CollisionSet(
            p=self.p, n_p=self.n_p, o=self.o, link=self.link,
            obj_index=self.obj_index, side=self.side,
            p_g=other.p_g, o_g=other.o_g, link_g=other.link_g,
        )


def _opposite_face_point(box, p_world: np.ndarray) -> np.ndarray:
    """Project a hand point onto the box face opposite the one it belongs to."""
    local = box.to_local(p_world)
    he = box.half_extents
    face = int(np.argmin(he - np.abs(local)))
    target = local.copy()
    target[face] = -np.sign(local[face]) * he[face] if local[face] != 0 else he[face]
    keep = np.arange(3) != face
    target[keep] = np.clip(target[keep], -he[keep], he[keep])
    return box.frame.apply(target)


def detect_object_collisions(
    posed: PosedHand, obj: SurfacePointCloud, margin: float = DEFAULT_BOX_MARGIN
) -> CollisionSet:
    """Object points inside any posed link box, paired with link hand points."""
    p_list, n_list, o_list, link_list, idx_list, side_list = [], [], [], [], [], []
    for lid in sorted(posed.boxes):
        box = posed.boxes[lid]
        inside = box.contains(obj.points, margin=margin)
        if not inside.any():
            continue
        obj_idx = np.flatnonzero(inside)
        link_pts = posed.link_points(lid)
        link_nrm = posed.link_normals(lid)
        tree = cKDTree(link_pts)
        d, nn = tree.query(obj.points[obj_idx])
        # lowest-index tie break, to stay equal to the brute-force oracle
        for k in range(len(obj_idx)):
            ball = tree.query_ball_point(obj.points[obj_idx[k]], d[k] * (1 + 1e-12) + 1e-300)
            if len(ball) > 1:
                nn[k] = min(ball)
        p_l = link_pts[nn]
        n_l = link_nrm[nn]
        o_l = obj.points[obj_idx]

        # inner/outer: object points behind the hand surface mean the pad side
        score = float(np.einsum("ij,ij->i", n_l, o_l - p_l).sum())
        side = INNER if score < 0 else OUTER
        if side == OUTER:
            p_l = np.array([_opposite_face_point(box, p) for p in p_l])

        p_list.append(p_l)
        n_list.append(n_l)
        o_list.append(o_l)
        link_list.append(np.full(len(obj_idx), lid, dtype=np.int64))
        idx_list.append(obj_idx.astype(np.int64))
        side_list.extend([side] * len(obj_idx))

    if not o_list:
        return CollisionSet()
    return CollisionSet(
        p=np.vstack(p_list),
        n_p=np.vstack(n_list),
        o=np.vstack(o_list),
        link=np.concatenate(link_list),
        obj_index=np.concatenate(idx_list),
        side=tuple(side_list),
    )


def detect_ground_collisions(posed: PosedHand) -> CollisionSet:
    """Hand points below the ground plane z = 0, paired with their foot points."""
    below = posed.points[:, 2] < 0.0
    if not below.any():
        return CollisionSet()
    pts = posed.points[below]
    feet = pts.copy()
    feet[:, 2] = 0.0
    return CollisionSet(p_g=pts, o_g=feet, link_g=posed.link_ids[below].copy())


def detect_collisions(
    posed: PosedHand, obj: SurfacePointCloud, margin: float = DEFAULT_BOX_MARGIN
) -> CollisionSet:
    return detect_object_collisions(posed, obj, margin).merged(detect_ground_collisions(posed))


def eval_e_col(cols: CollisionSet) -> float:
    """Penetration penalty: squared pair gaps plus squared ground penetrations."""
    total = float(np.sum((cols.p - cols.o) ** 2))
    if cols.n_ground_pairs:
        depth = (cols.p_g - cols.o_g) @ GROUND_NORMAL
        total += float(np.sum(depth**2))
    return total
