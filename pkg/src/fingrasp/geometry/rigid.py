"""Rigid-body math: skew matrices, the rotation exponential, and SE(3) transforms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_ORTHO_TOL = 1e-9


def so3_hat(r: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix of ``r`` such that ``so3_hat(r) @ v == cross(r, v)``."""
    x, y, z = np.asarray(r, dtype=float)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def so3_exp(r: np.ndarray) -> np.ndarray:
    """Rotation matrix for the axis-angle vector ``r`` (Rodrigues formula).

    Small angles use the series expansion of sin(t)/t and (1-cos(t))/t^2,
    so the zero vector maps exactly to the identity.
    """
    r = np.asarray(r, dtype=float)
    theta2 = float(r @ r)
    K = so3_hat(r)
    if theta2 < 1e-8:
        # sin(t)/t = 1 - t^2/6 + t^4/120, (1-cos t)/t^2 = 1/2 - t^2/24 + t^4/720
        a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0
        b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0
    else:
        theta = np.sqrt(theta2)
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / theta2
    return np.eye(3) + a * K + b * (K @ K)


def is_rotation_matrix(R: np.ndarray, tol: float = _ORTHO_TOL) -> bool:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        return False
    return (
        np.abs(R.T @ R - np.eye(3)).max() <= tol
        and abs(np.linalg.det(R) - 1.0) <= tol
    )


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class RigidTransform:
    """Rigid motion ``x -> R @ x + t``; rotation is 3x3, translation is 3-vector."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rotation", _freeze(self.rotation))
        object.__setattr__(self, "translation", _freeze(self.translation))

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform(np.eye(3), np.zeros(3))

    @staticmethod
    def from_rotvec(rotvec, translation) -> "RigidTransform":
        return RigidTransform(so3_exp(np.asarray(rotvec, float)), np.asarray(translation, float))

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self applied after other: (self @ other)(x) = self(other(x))."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def __matmul__(self, other: "RigidTransform") -> "RigidTransform":
        return self.compose(other)

    def inverse(self) -> "RigidTransform":
        Rt = self.rotation.T
        return RigidTransform(Rt, -Rt @ self.translation)

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform one point (3,) or a stack of points (N, 3)."""
        p = np.asarray(points, dtype=float)
        return p @ self.rotation.T + self.translation

    def rotate(self, vectors: np.ndarray) -> np.ndarray:
        """Rotate directions/normals; ignores the translation part."""
        return np.asarray(vectors, dtype=float) @ self.rotation.T
