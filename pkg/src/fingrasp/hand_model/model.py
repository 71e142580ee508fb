"""Hand description types and the optimization state (palm pose + joints)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import FingraspError
from ..geometry import OrientedBoundingBox, RigidTransform, SurfacePointCloud

PALM_LINK = 0
_LIMIT_TOL = 1e-9


@dataclass(frozen=True)
class RevoluteJoint:
    """One revolute joint: fixed mounting transform, rotation axis, limits."""

    name: str
    origin: RigidTransform      # joint frame in the parent link frame
    axis: np.ndarray            # unit rotation axis in the joint frame
    q_min: float
    q_max: float
    q_mean: float
    q_open: float
    alpha: float                # joint-centering weight in the quality term

    def __post_init__(self):
        ax = np.ascontiguousarray(self.axis, dtype=float)
        n = np.linalg.norm(ax)
        if n < 1e-12:
            raise FingraspError(f"joint {self.name}: zero rotation axis")
        ax = ax / n
        ax.setflags(write=False)
        object.__setattr__(self, "axis", ax)
        if not self.q_min < self.q_max:
            raise FingraspError(f"joint {self.name}: q_min must be < q_max")
        for label, v in (("q_mean", self.q_mean), ("q_open", self.q_open)):
            if not self.q_min - _LIMIT_TOL <= v <= self.q_max + _LIMIT_TOL:
                raise FingraspError(f"joint {self.name}: {label} outside joint limits")


@dataclass(frozen=True)
class Finger:
    """Kinematic chain of revolute joints with per-link collision geometry.

    ``link_clouds[j]`` / ``link_boxes[j]`` describe the link that moves with
    joint ``j`` (``None`` for bare articulation points such as a spread
    knuckle). The fingertip patch lives in the distal link frame.
    """

    name: str
    joints: tuple
    link_clouds: tuple          # per joint: SurfacePointCloud | None, link frame
    link_boxes: tuple           # per joint: OrientedBoundingBox | None, link frame
    fingertip_patch: SurfacePointCloud

    def __post_init__(self):
        if not self.joints:
            raise FingraspError(f"finger {self.name}: needs at least one joint")
        if len(self.link_clouds) != len(self.joints) or len(self.link_boxes) != len(self.joints):
            raise FingraspError(f"finger {self.name}: one link entry required per joint")
        object.__setattr__(self, "joints", tuple(self.joints))
        object.__setattr__(self, "link_clouds", tuple(self.link_clouds))
        object.__setattr__(self, "link_boxes", tuple(self.link_boxes))

    @property
    def n_joints(self) -> int:
        return len(self.joints)

    def _vec(self, attr) -> np.ndarray:
        return np.array([getattr(j, attr) for j in self.joints])

    @property
    def q_min(self) -> np.ndarray:
        return self._vec("q_min")

    @property
    def q_max(self) -> np.ndarray:
        return self._vec("q_max")

    @property
    def q_mean(self) -> np.ndarray:
        return self._vec("q_mean")

    @property
    def q_open(self) -> np.ndarray:
        return self._vec("q_open")

    @property
    def alpha(self) -> np.ndarray:
        return self._vec("alpha")


@dataclass(frozen=True)
class HandModel:
    """Palm cloud plus fingers; link 0 is the palm, finger links follow in order."""

    name: str
    palm_cloud: SurfacePointCloud
    fingers: tuple
    spec: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fingers", tuple(self.fingers))
        if not self.fingers:
            raise FingraspError("hand model needs at least one finger")

    @property
    def n_fingers(self) -> int:
        return len(self.fingers)

    @property
    def n_joints(self) -> int:
        return sum(f.n_joints for f in self.fingers)

    @property
    def n_surface_points(self) -> int:
        total = len(self.palm_cloud)
        for f in self.fingers:
            total += sum(len(c) for c in f.link_clouds if c is not None)
            total += len(f.fingertip_patch)
        return total

    def joint_slice(self, finger_idx: int) -> slice:
        """Columns of the full joint vector belonging to one finger."""
        start = sum(self.fingers[k].n_joints for k in range(finger_idx))
        return slice(start, start + self.fingers[finger_idx].n_joints)

    def q_vector(self, attr: str) -> np.ndarray:
        return np.concatenate([getattr(f, attr) for f in self.fingers])

    @property
    def q_min(self) -> np.ndarray:
        return self.q_vector("q_min")

    @property
    def q_max(self) -> np.ndarray:
        return self.q_vector("q_max")

    @property
    def q_mean(self) -> np.ndarray:
        return self.q_vector("q_mean")

    @property
    def q_open(self) -> np.ndarray:
        return self.q_vector("q_open")

    @property
    def alpha(self) -> np.ndarray:
        return self.q_vector("alpha")

    def link_table(self):
        """Link ids in order: ``[(link_id, finger_idx | None, joint_idx | None)]``."""
        table = [(PALM_LINK, None, None)]
        lid = PALM_LINK + 1
        for fi, f in enumerate(self.fingers):
            for ji in range(f.n_joints):
                table.append((lid, fi, ji))
                lid += 1
        return table


@dataclass(frozen=True)
class HandState:
    """Palm pose and joint vector; joints are validated against the limits."""

    pose: RigidTransform
    q: np.ndarray

    def __post_init__(self):
        q = np.ascontiguousarray(self.q, dtype=float)
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @staticmethod
    def checked(pose: RigidTransform, q: np.ndarray, model: HandModel) -> "HandState":
        q = np.asarray(q, dtype=float)
        if q.shape != (model.n_joints,):
            raise FingraspError(f"joint vector has shape {q.shape}, expected ({model.n_joints},)")
        lo, hi = model.q_min, model.q_max
        if np.any(q < lo - _LIMIT_TOL) or np.any(q > hi + _LIMIT_TOL):
            bad = int(np.argmax(np.maximum(lo - q, q - hi)))
            raise FingraspError(f"joint {bad} out of limits: q={q[bad]:.6g}")
        return HandState(pose, np.clip(q, lo, hi))
