"""Forward kinematics and analytic Jacobians for the hand model.

Joint axes and origins are tracked in the palm frame; the posed hand caches
both palm-frame and world-frame quantities so the solvers can assemble rows
without re-running the chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import FingraspError
from ..geometry import OrientedBoundingBox, RigidTransform, so3_exp
from .model import PALM_LINK, HandModel, HandState


@dataclass(frozen=True)
class PosedHand:
    """World-frame snapshot of the hand at one state.

    All per-point arrays are concatenated over links; ``link_slices`` maps a
    link id to its range. Distal-link ranges include the fingertip patch.
    """

    model: HandModel
    state: HandState
    points: np.ndarray          # (N, 3) world hand surface points
    normals: np.ndarray         # (N, 3) world outward normals
    link_ids: np.ndarray        # (N,) link id per point
    link_slices: dict           # link id -> slice into the arrays above
    boxes: dict                 # link id -> OrientedBoundingBox, world frame
    patch_slices: tuple         # per finger: slice of its fingertip patch points
    p_f: np.ndarray             # (N_c, 3) fingertip centroids, world
    n_f: np.ndarray             # (N_c, 3) fingertip normals, world
    joint_origins: tuple        # per finger: (n_i, 3) joint positions, palm frame
    joint_axes: tuple           # per finger: (n_i, 3) joint axes, palm frame
    link_chain: dict            # link id -> (finger_idx, joint_idx); palm -> None

    @property
    def palm_pose(self) -> RigidTransform:
        return self.state.pose

    @property
    def n_fingers(self) -> int:
        return self.model.n_fingers

    def approach_axis(self) -> np.ndarray:
        """World direction the palm faces (its -z axis), pointing at the object."""
        return -self.state.pose.rotation[:, 2]

    def to_palm(self, points_world: np.ndarray) -> np.ndarray:
        return self.state.pose.inverse().apply(points_world)

    def link_points(self, link_id: int) -> np.ndarray:
        return self.points[self.link_slices[link_id]]

    def link_normals(self, link_id: int) -> np.ndarray:
        return self.normals[self.link_slices[link_id]]


def forward_kinematics(model: HandModel, state: HandState) -> PosedHand:
    """Pose every link cloud, box and fingertip patch at the given state."""
    if state.q.shape != (model.n_joints,):
        raise FingraspError(
            f"joint vector has shape {state.q.shape}, expected ({model.n_joints},)"
        )
    palm = state.pose

    pts_parts = [model.palm_cloud.points]
    nrm_parts = [model.palm_cloud.normals]
    ids_parts = [np.full(len(model.palm_cloud), PALM_LINK, dtype=np.int64)]
    link_slices = {}
    boxes = {}
    link_chain = {PALM_LINK: None}
    patch_bounds = []
    p_f = np.empty((model.n_fingers, 3))
    n_f = np.empty((model.n_fingers, 3))
    joint_origins = []
    joint_axes = []

    cursor = len(model.palm_cloud)
    link_slices[PALM_LINK] = slice(0, cursor)
    lid = PALM_LINK + 1

    for fi, finger in enumerate(model.fingers):
        q_i = state.q[model.joint_slice(fi)]
        frame = RigidTransform.identity()  # palm frame
        origins = np.empty((finger.n_joints, 3))
        axes = np.empty((finger.n_joints, 3))
        for ji, joint in enumerate(finger.joints):
            pre = frame @ joint.origin
            origins[ji] = pre.translation
            axes[ji] = pre.rotation @ joint.axis
            frame = pre @ RigidTransform(so3_exp(joint.axis * q_i[ji]), np.zeros(3))
            link_chain[lid] = (fi, ji)

            cloud = finger.link_clouds[ji]
            start = cursor
            if cloud is not None:
                pts_parts.append(frame.apply(cloud.points))
                nrm_parts.append(frame.rotate(cloud.normals))
                cursor += len(cloud)
            if ji == finger.n_joints - 1:
                patch = finger.fingertip_patch
                pts_parts.append(frame.apply(patch.points))
                nrm_parts.append(frame.rotate(patch.normals))
                patch_bounds.append(slice(cursor, cursor + len(patch)))
                cursor += len(patch)
            if cursor > start:
                ids_parts.append(np.full(cursor - start, lid, dtype=np.int64))
            link_slices[lid] = slice(start, cursor)

            box = finger.link_boxes[ji]
            if box is not None:
                boxes[lid] = OrientedBoundingBox(palm @ frame @ box.frame, box.half_extents)
            lid += 1
        joint_origins.append(origins)
        joint_axes.append(axes)

    points_palm = np.vstack(pts_parts)
    normals_palm = np.vstack(nrm_parts)
    points = palm.apply(points_palm)
    normals = palm.rotate(normals_palm)
    link_ids = np.concatenate(ids_parts)

    for fi in range(model.n_fingers):
        patch_pts = points[patch_bounds[fi]]
        patch_nrm = normals[patch_bounds[fi]]
        p_f[fi] = patch_pts.mean(axis=0)
        mean_n = patch_nrm.mean(axis=0)
        norm = np.linalg.norm(mean_n)
        if norm < 1e-12:
            raise FingraspError(f"finger {fi}: degenerate fingertip patch normals")
        n_f[fi] = mean_n / norm

    return PosedHand(
        model=model,
        state=state,
        points=points,
        normals=normals,
        link_ids=link_ids,
        link_slices=link_slices,
        boxes=boxes,
        patch_slices=tuple(patch_bounds),
        p_f=p_f,
        n_f=n_f,
        joint_origins=tuple(joint_origins),
        joint_axes=tuple(joint_axes),
        link_chain=link_chain,
    )


def translational_jacobian(posed: PosedHand, finger_idx: int) -> np.ndarray:
    """(3, n_i) palm-frame Jacobian of the fingertip centroid w.r.t. finger joints."""
    pf_palm = posed.to_palm(posed.p_f[finger_idx])
    z = posed.joint_axes[finger_idx]
    o = posed.joint_origins[finger_idx]
    return np.cross(z, pf_palm - o).T


def rotational_jacobian(posed: PosedHand, finger_idx: int) -> np.ndarray:
    """(3, n_i) palm-frame Jacobian of the fingertip orientation: joint axes."""
    return posed.joint_axes[finger_idx].T.copy()


def point_jacobian(posed: PosedHand, link_id: int, point_world: np.ndarray) -> np.ndarray:
    """(3, N_jnt) palm-frame Jacobian of a point attached to the given link.

    Columns of joints downstream of the link, or on other fingers, are zero.
    """
    model = posed.model
    J = np.zeros((3, model.n_joints))
    chain = posed.link_chain[link_id]
    if chain is None:  # palm point: joints cannot move it
        return J
    fi, ji = chain
    p_palm = posed.to_palm(np.asarray(point_world, dtype=float))
    z = posed.joint_axes[fi][: ji + 1]
    o = posed.joint_origins[fi][: ji + 1]
    cols = model.joint_slice(fi).start
    J[:, cols: cols + ji + 1] = np.cross(z, p_palm - o).T
    return J
