"""Palm pose optimization: one damped least-squares step over (rotation, translation).

With joints frozen, every quality and penalty residual is linear in the palm
increment x = [r, dt] (rotation linearized as I + hat(r)), so the step is the
solution of a single stacked least-squares system. A trust region caps the
increment to keep the rotation linearization valid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .collision import GROUND_NORMAL, CollisionSet
from .contact import ContactSet
from .errors import SolverError
from .geometry import RigidTransform, so3_exp, so3_hat
from .hand_model import HandState

ROTATION_CAP = 0.3   # rad per iteration
TRANSLATION_CAP = 0.02  # m per iteration
_DAMPING = 1e-9

ROW_COM = "com"
ROW_ALIGN = "align"
ROW_OBJ = "obj"
ROW_GND = "gnd"
ROW_CLS = "cls"


@dataclass(frozen=True)
class PpoSystem:
    A: np.ndarray          # (rows, 6)
    b: np.ndarray          # (rows,)
    tags: tuple            # row provenance: com | align | obj | gnd | cls


@dataclass(frozen=True)
class PalmIncrement:
    r: np.ndarray          # axis-angle rotation increment
    dt: np.ndarray         # translation increment

    def __post_init__(self):
        object.__setattr__(self, "r", np.ascontiguousarray(self.r, dtype=float))
        object.__setattr__(self, "dt", np.ascontiguousarray(self.dt, dtype=float))


def build_ppo_system(
    contacts: ContactSet,
    collisions: CollisionSet,
    p_com: np.ndarray,
    n_perp: np.ndarray,
    w: float,
    beta: float,
) -> PpoSystem:
    """Stack the center-of-mass, alignment, collision, and closeness rows."""
    n_c = contacts.n_fingers
    rows_a = []
    rows_b = []
    tags = []

    for i in range(n_c):
        rows_a.append(np.concatenate([np.cross(contacts.p_f[i], n_perp), n_perp]))
        rows_b.append(n_perp @ (p_com - contacts.p_f[i]))
        tags.append(ROW_COM)

    for i in range(n_c):
        rows_a.append(beta * np.concatenate([np.cross(contacts.n_f[i], contacts.n_c[i]), np.zeros(3)]))
        rows_b.append(-beta * (contacts.n_f[i] @ contacts.n_c[i] + 1.0))
        tags.append(ROW_ALIGN)

    for l in range(collisions.n_object_pairs):
        block = np.hstack([-so3_hat(collisions.p[l]), np.eye(3)])
        rows_a.extend(w * block)
        rows_b.extend(w * (collisions.o[l] - collisions.p[l]))
        tags.extend([ROW_OBJ] * 3)

    for l in range(collisions.n_ground_pairs):
        p_l = collisions.p_g[l]
        rows_a.append(w * np.concatenate([np.cross(p_l, GROUND_NORMAL), GROUND_NORMAL]))
        rows_b.append(w * (collisions.o_g[l] - p_l) @ GROUND_NORMAL)
        tags.append(ROW_GND)

    for i in range(n_c):
        rows_a.append(w * np.concatenate([np.cross(contacts.p_f[i], contacts.n_c[i]), contacts.n_c[i]]))
        rows_b.append(w * (contacts.c[i] - contacts.p_f[i]) @ contacts.n_c[i])
        tags.append(ROW_CLS)

    return PpoSystem(A=np.array(rows_a), b=np.array(rows_b), tags=tuple(tags))


def solve_ppo(system: PpoSystem) -> PalmIncrement:
    """Damped normal equations followed by uniform trust-region scaling."""
    A, b = system.A, system.b
    if not (np.isfinite(A).all() and np.isfinite(b).all()):
        raise SolverError("ill-posed PPO system")
    G = A.T @ A
    trace = float(np.trace(G))
    if trace <= 0.0:
        return PalmIncrement(np.zeros(3), np.zeros(3))
    lam = _DAMPING * trace / 6.0
    x = np.linalg.solve(G + lam * np.eye(6), A.T @ b)

    r, dt = x[:3], x[3:]
    scale = 1.0
    r_norm = float(np.linalg.norm(r))
    t_norm = float(np.linalg.norm(dt))
    if r_norm > ROTATION_CAP:
        scale = min(scale, ROTATION_CAP / r_norm)
    if t_norm > TRANSLATION_CAP:
        scale = min(scale, TRANSLATION_CAP / t_norm)
    return PalmIncrement(scale * r, scale * dt)


def apply_palm_update(state: HandState, inc: PalmIncrement) -> HandState:
    """Left-compose the increment: R <- dR R, t <- dR t + dt; joints unchanged."""
    dR = so3_exp(inc.r)
    pose = state.pose
    return HandState(
        RigidTransform(dR @ pose.rotation, dR @ pose.translation + inc.dt), state.q
    )
