"""Joint position optimization: box-constrained least squares over joint increments.

With the palm frozen, residuals are linear in the joint increment through the
finger Jacobians. The box constraint (joint limits) is handled by projected
gradient from the clamped unconstrained solution, with a step size set by the
largest singular value of the stacked system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .collision import GROUND_NORMAL, CollisionSet
from .contact import ContactSet
from .errors import SolverError
from .hand_model import (
    HandState,
    PosedHand,
    point_jacobian,
    rotational_jacobian,
    translational_jacobian,
)

_DAMPING = 1e-9
_BOUND_TOL = 1e-12

DEFAULT_MAX_INNER_ITERATIONS = 200
DEFAULT_TOLERANCE = 1e-8
POWER_ITERATIONS = 20

ROW_COM = "com"
ROW_JC = "jc"
ROW_ALIGN = "align"
ROW_OBJ = "obj"
ROW_GND = "gnd"
ROW_CLS = "cls"


@dataclass(frozen=True)
class JpoSystem:
    C: np.ndarray          # (rows, N_jnt)
    d: np.ndarray          # (rows,)
    lo: np.ndarray         # q_min - q  (<= 0)
    hi: np.ndarray         # q_max - q  (>= 0)
    tags: tuple


def build_jpo_system(
    posed: PosedHand,
    contacts: ContactSet,
    collisions: CollisionSet,
    p_com: np.ndarray,
    n_perp: np.ndarray,
    w: float,
    beta: float,
) -> JpoSystem:
    """Stack quality, joint-centering, collision, and closeness rows over joints."""
    model = posed.model
    state = posed.state
    n_jnt = model.n_joints
    n_c = model.n_fingers
    R = state.pose.rotation

    J_v = [R @ translational_jacobian(posed, i) for i in range(n_c)]
    J_w = [R @ rotational_jacobian(posed, i) for i in range(n_c)]
    slices = [model.joint_slice(i) for i in range(n_c)]

    rows_c = []
    rows_d = []
    tags = []

    for i in range(n_c):
        row = np.zeros(n_jnt)
        row[slices[i]] = n_perp @ J_v[i]
        rows_c.append(row)
        rows_d.append((p_com - contacts.p_f[i]) @ n_perp)
        tags.append(ROW_COM)

    ranges = model.q_max - model.q_min
    jc_gain = model.alpha / ranges
    for j in range(n_jnt):
        row = np.zeros(n_jnt)
        row[j] = jc_gain[j]
        rows_c.append(row)
        rows_d.append(jc_gain[j] * (model.q_mean[j] - state.q[j]))
        tags.append(ROW_JC)

    for i in range(n_c):
        row = np.zeros(n_jnt)
        row[slices[i]] = beta * np.cross(contacts.n_f[i], contacts.n_c[i]) @ J_w[i]
        rows_c.append(row)
        rows_d.append(-beta * (contacts.n_c[i] @ contacts.n_f[i] + 1.0))
        tags.append(ROW_ALIGN)

    for l in range(collisions.n_object_pairs):
        J_l = R @ point_jacobian(posed, int(collisions.link[l]), collisions.p[l])
        rows_c.extend(w * J_l)
        rows_d.extend(w * (collisions.o[l] - collisions.p[l]))
        tags.extend([ROW_OBJ] * 3)

    for l in range(collisions.n_ground_pairs):
        J_l = R @ point_jacobian(posed, int(collisions.link_g[l]), collisions.p_g[l])
        rows_c.append(w * GROUND_NORMAL @ J_l)
        rows_d.append(w * (collisions.o_g[l] - collisions.p_g[l]) @ GROUND_NORMAL)
        tags.append(ROW_GND)

    for i in range(n_c):
        row = np.zeros(n_jnt)
        row[slices[i]] = w * contacts.n_c[i] @ J_v[i]
        rows_c.append(row)
        rows_d.append(w * (contacts.c[i] - contacts.p_f[i]) @ contacts.n_c[i])
        tags.append(ROW_CLS)

    return JpoSystem(
        C=np.array(rows_c),
        d=np.array(rows_d),
        lo=model.q_min - state.q,
        hi=model.q_max - state.q,
        tags=tuple(tags),
    )


def _sigma_max_sq(G: np.ndarray) -> float:
    """Largest eigenvalue of C^T C by a fixed number of power iterations."""
    n = G.shape[0]
    v = np.ones(n) / np.sqrt(n)
    lam = 0.0
    for _ in range(POWER_ITERATIONS):
        gv = G @ v
        norm = np.linalg.norm(gv)
        if norm < 1e-300:
            return 0.0
        v = gv / norm
        lam = float(v @ G @ v)
    return lam


def solve_box_ls(
    system: JpoSystem,
    max_iterations: int = DEFAULT_MAX_INNER_ITERATIONS,
    tolerance: float = DEFAULT_TOLERANCE,
) -> np.ndarray:
    """Projected-gradient solution of min ||C dq - d||^2 with dq in [lo, hi].

    Warm started from the clamped damped-normal-equation solution (or zero if
    that is worse); the fixed step 0.9 / sigma_max(C)^2 makes the objective
    non-increasing, so the result is never worse than either start.
    """
    C, d, lo, hi = system.C, system.d, system.lo, system.hi
    if not (np.isfinite(C).all() and np.isfinite(d).all()):
        raise SolverError("ill-posed JPO system")
    n = C.shape[1]
    G = C.T @ C
    trace = float(np.trace(G))
    if trace <= 0.0:
        return np.clip(np.zeros(n), lo, hi)
    lam = _DAMPING * trace / n
    dq0 = np.linalg.solve(G + lam * np.eye(n), C.T @ d)
    dq = np.clip(dq0, lo, hi)

    def objective(x):
        r = C @ x - d
        return float(r @ r)

    zero = np.clip(np.zeros(n), lo, hi)
    if objective(zero) < objective(dq):
        dq = zero

    sigma_sq = _sigma_max_sq(G)
    if sigma_sq <= 0.0:
        return dq
    gamma = 0.9 / sigma_sq

    Ctd = C.T @ d
    for _ in range(max_iterations):
        grad = G @ dq - Ctd
        nxt = np.clip(dq - gamma * grad, lo, hi)
        if np.max(np.abs(nxt - dq)) < tolerance:
            dq = nxt
            break
        dq = nxt
    return dq


def apply_joint_update(state: HandState, dq: np.ndarray, model) -> HandState:
    """q <- q + dq, which must stay within the joint limits; pose unchanged."""
    dq = np.asarray(dq, dtype=float)
    q_new = state.q + dq
    lo, hi = model.q_min, model.q_max
    if np.any(q_new < lo - _BOUND_TOL) or np.any(q_new > hi + _BOUND_TOL):
        bad = int(np.argmax(np.maximum(lo - q_new, q_new - hi)))
        raise SolverError(f"joint update violates limits at joint {bad}")
    return HandState(state.pose, np.clip(q_new, lo, hi))
