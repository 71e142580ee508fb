"""Contact assignment and the geometric grasp quality terms.

Each fingertip's contact patch is the set of object points nearest to its
sampled pad points; the contact point/normal are the patch means. Quality
terms are evaluated at the current configuration (zero increment), matching
the residuals the solvers linearize.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FingraspError
from .geometry import SurfacePointCloud
from .hand_model import HandModel, HandState, PosedHand

_DEGENERATE_NORMAL = 1e-8


@dataclass(frozen=True)
class ContactSet:
    """Per-finger contact point/normal and fingertip centroid/normal (world)."""

    c: np.ndarray               # (N_c, 3) contact points on the object
    n_c: np.ndarray             # (N_c, 3) contact normals (object, outward)
    p_f: np.ndarray             # (N_c, 3) fingertip centroids
    n_f: np.ndarray             # (N_c, 3) fingertip normals (hand, outward)
    matched: tuple              # per finger: object point indices of the patch
    fallback: np.ndarray        # (N_c,) True where the contact normal was degenerate

    @property
    def n_fingers(self) -> int:
        return len(self.c)

    @property
    def any_fallback(self) -> bool:
        return bool(self.fallback.any())


@dataclass(frozen=True)
class QualityReport:
    q_com: float
    q_jc: float
    q_align: float
    e_cls: float
    n_perp: np.ndarray

    @property
    def e_quality(self) -> float:
        """Positive total quality error: -(q_com + q_jc + q_align)."""
        return -(self.q_com + self.q_jc + self.q_align)


def assign_contacts(posed: PosedHand, obj: SurfacePointCloud) -> ContactSet:
    """Match every fingertip pad point to its nearest object point.

    The contact point is the mean of the matched object points (with
    multiplicity) and the contact normal the normalized mean of their
    normals. A degenerate mean normal falls back to the direction from the
    fingertip toward the object's center of mass and is flagged.
    """
    n_c = posed.n_fingers
    c = np.empty((n_c, 3))
    nc = np.empty((n_c, 3))
    matched = []
    fallback = np.zeros(n_c, dtype=bool)
    for fi in range(n_c):
        patch = posed.points[posed.patch_slices[fi]]
        _, idx = obj.tree.query(patch)
        matched.append(np.ascontiguousarray(idx, dtype=np.int64))
        c[fi] = obj.points[idx].mean(axis=0)
        mean_n = obj.normals[idx].mean(axis=0)
        norm = np.linalg.norm(mean_n)
        if norm < _DEGENERATE_NORMAL:
            direction = obj.center_of_mass - posed.p_f[fi]
            dn = np.linalg.norm(direction)
            nc[fi] = direction / dn if dn > 0 else np.array([0.0, 0.0, 1.0])
            fallback[fi] = True
        else:
            nc[fi] = mean_n / norm
    return ContactSet(
        c=c, n_c=nc, p_f=posed.p_f.copy(), n_f=posed.n_f.copy(),
        matched=tuple(matched), fallback=fallback,
    )


def polygon_normal(p_f: np.ndarray, approach: np.ndarray) -> np.ndarray:
    """Unit normal of the fingertip polygon, signed along the palm approach.

    Three fingertips use the exact edge cross product; more use the smallest
    singular vector of the centered positions (best-fit plane). The sign is
    chosen so the normal points from the palm toward the object.
    """
    p_f = np.asarray(p_f, dtype=float)
    if len(p_f) < 3:
        raise FingraspError("polygon normal needs at least 3 fingertips")
    if len(p_f) == 3:
        e1 = p_f[1] - p_f[0]
        e2 = p_f[2] - p_f[0]
        n = np.cross(e1, e2)
        norm = np.linalg.norm(n)
        denom = np.linalg.norm(e1) * np.linalg.norm(e2)
        if denom <= 0 or norm < 1e-9 * denom:
            raise FingraspError("degenerate contact polygon")
    else:
        centered = p_f - p_f.mean(axis=0)
        _, s, vt = np.linalg.svd(centered, full_matrices=False)
        if s[0] <= 0 or s[-2] < 1e-9 * s[0]:
            raise FingraspError("degenerate contact polygon")
        n = vt[-1]
        norm = np.linalg.norm(n)
    n = n / norm
    if n @ np.asarray(approach, dtype=float) < 0:
        n = -n
    return n


def eval_q_com(contacts: ContactSet, p_com: np.ndarray, n_perp: np.ndarray) -> float:
    """Negated squared projections of fingertip offsets from the center of mass."""
    proj = (contacts.p_f - np.asarray(p_com, float)) @ np.asarray(n_perp, float)
    return -float(np.sum(proj**2))


def eval_q_jc(state: HandState, model: HandModel) -> float:
    """Negated squared normalized deviation of joints from their mean values."""
    r = model.alpha * (state.q - model.q_mean) / (model.q_max - model.q_min)
    return -float(np.sum(r**2))


def eval_q_align(contacts: ContactSet, beta: float) -> float:
    """Negated squared misalignment; zero iff every contact is anti-parallel."""
    dots = np.einsum("ij,ij->i", contacts.n_c, contacts.n_f)
    return -float(beta**2 * np.sum((dots + 1.0) ** 2))


def eval_e_cls(contacts: ContactSet) -> float:
    """Squared fingertip-to-contact closeness residuals along the contact normals."""
    gaps = np.einsum("ij,ij->i", contacts.p_f - contacts.c, contacts.n_c)
    return float(np.sum(gaps**2))


def quality_report(
    contacts: ContactSet,
    state: HandState,
    model: HandModel,
    p_com: np.ndarray,
    n_perp: np.ndarray,
    beta: float,
) -> QualityReport:
    return QualityReport(
        q_com=eval_q_com(contacts, p_com, n_perp),
        q_jc=eval_q_jc(state, model),
        q_align=eval_q_align(contacts, beta),
        e_cls=eval_e_cls(contacts),
        n_perp=np.asarray(n_perp, dtype=float),
    )
