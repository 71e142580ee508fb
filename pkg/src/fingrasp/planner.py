"""Grasp planner: guided restarts around an alternating palm/joint optimization.

Each sample places the opened hand over a surface cluster center and runs a
fixed number of alternating palm-pose and joint-position steps under an
exponentially growing collision penalty. Cluster centers that historically
produce accepted grasps are sampled more often.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .collision import DEFAULT_BOX_MARGIN, CollisionSet, detect_collisions, eval_e_col
from .contact import ContactSet, QualityReport, assign_contacts, polygon_normal, quality_report
from .errors import FingraspError
from .geometry import RigidTransform, SurfacePointCloud, kmeans
from .hand_model import HandModel, HandState, forward_kinematics
from .jpo import build_jpo_system, solve_box_ls, apply_joint_update
from .ppo import build_ppo_system, solve_ppo, apply_palm_update

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlannerConfig:
    t_max: int = 40
    w0: float = 1.0
    w_growth: float = 1.1
    beta: float = 0.03
    n_samples: int = 10
    k_clusters: int = 10
    standoff: float = 0.10
    seed: int = 0
    e_cls_tol: float = 1e-4
    n_object_points: int = 2000
    box_margin: float = DEFAULT_BOX_MARGIN
    workers: int = 1
    jpo_max_iterations: int = 200
    jpo_tolerance: float = 1e-8

    def __post_init__(self):
        if self.t_max < 0 or self.n_samples < 0:
            raise FingraspError("t_max and n_samples must be non-negative")
        for name in ("w0", "beta", "standoff", "e_cls_tol", "jpo_tolerance"):
            if getattr(self, name) <= 0:
                raise FingraspError(f"{name} must be positive")
        if self.w_growth < 1.0:
            raise FingraspError("w_growth must be >= 1")
        if self.k_clusters < 1 or self.workers < 1 or self.jpo_max_iterations < 1:
            raise FingraspError("k_clusters, workers, jpo_max_iterations must be >= 1")
        if self.n_object_points < 1:
            raise FingraspError("n_object_points must be >= 1")
        if self.box_margin < 0:
            raise FingraspError("box_margin must be >= 0")


def penalty_weight(cfg: PlannerConfig, t: int) -> float:
    """Scheduled collision penalty for iteration t: w0 * w_growth ** t."""
    return cfg.w0 * cfg.w_growth**t


@dataclass(frozen=True)
class TraceEntry:
    t: int
    w: float
    e_quality: float
    e_penalty: float
    e_col: float
    e_cls: float


@dataclass(frozen=True)
class GraspResult:
    """One optimized sample: final state, quality breakdown, and iteration trace."""

    sample_index: int
    cluster_index: int
    state: HandState
    contacts: ContactSet
    quality: QualityReport
    e_col: float
    collision_pairs: int
    collision_free: bool
    accepted: bool
    trace: tuple
    wall_time: float
    error: str = None

    @property
    def e_quality(self) -> float:
        return self.quality.e_quality

    @property
    def e_penalty(self) -> float:
        return self.e_col + self.quality.e_cls


@dataclass
class SamplerState:
    """Cluster centers with outward normals and accept/trial counts."""

    centers: np.ndarray
    normals: np.ndarray
    trials: np.ndarray
    successes: np.ndarray

    @property
    def k(self) -> int:
        return len(self.centers)

    def weights(self) -> np.ndarray:
        """Laplace-smoothed success rates, normalized to a distribution."""
        w = (self.successes + 1.0) / (self.trials + 2.0)
        return w / w.sum()

    def record(self, cluster: int, success: bool) -> None:
        self.trials[cluster] += 1
        if success:
            self.successes[cluster] += 1


def init_sampler(obj: SurfacePointCloud, k: int, seed: int) -> SamplerState:
    """K-means cluster centers with normals averaged over member points."""
    centers, labels = kmeans(obj.points, k, seed, return_labels=True)
    normals = np.empty_like(centers)
    for j in range(k):
        members = obj.normals[labels == j]
        mean_n = members.mean(axis=0) if len(members) else np.zeros(3)
        norm = np.linalg.norm(mean_n)
        if norm < 1e-12:
            mean_n = centers[j] - obj.center_of_mass
            norm = np.linalg.norm(mean_n)
            if norm < 1e-12:
                mean_n, norm = np.array([0.0, 0.0, 1.0]), 1.0
        normals[j] = mean_n / norm
    return SamplerState(
        centers=centers,
        normals=normals,
        trials=np.zeros(k, dtype=np.int64),
        successes=np.zeros(k, dtype=np.int64),
    )


def draw_initial_state(
    sampler: SamplerState, model: HandModel, rng: np.random.Generator, standoff: float
):
    """Place the opened hand over a success-weighted cluster center.

    The palm sits at ``center + standoff * normal`` facing along ``-normal``,
    with a uniform random roll about the approach axis. Returns the state and
    the chosen cluster index.
    """
    cluster = int(rng.choice(sampler.k, p=sampler.weights()))
    normal = sampler.normals[cluster]
    roll = rng.uniform(0.0, 2.0 * np.pi)

    helper = np.array([1.0, 0.0, 0.0]) if abs(normal[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    y0 = np.cross(normal, helper)
    y0 /= np.linalg.norm(y0)
    x0 = np.cross(y0, normal)
    x_axis = np.cos(roll) * x0 + np.sin(roll) * y0
    y_axis = np.cross(normal, x_axis)
    R = np.column_stack([x_axis, y_axis, normal])
    t = sampler.centers[cluster] + standoff * normal
    state = HandState(RigidTransform(R, t), model.q_open)
    return state, cluster


def _evaluate(model, state, obj, cfg):
    posed = forward_kinematics(model, state)
    contacts = assign_contacts(posed, obj)
    n_perp = polygon_normal(contacts.p_f, posed.approach_axis())
    cols = detect_collisions(posed, obj, cfg.box_margin)
    report = quality_report(contacts, state, model, obj.center_of_mass, n_perp, cfg.beta)
    return posed, contacts, n_perp, cols, report


def iterative_ppo_jpo(
    init: HandState,
    obj: SurfacePointCloud,
    model: HandModel,
    cfg: PlannerConfig,
    sample_index: int = 0,
    cluster_index: int = -1,
) -> GraspResult:
    """Alternate palm-pose and joint steps for t = 0..t_max, then evaluate.

    Contacts and collisions are refreshed before each of the two steps; the
    iteration-t systems use the scheduled penalty weight w(t).
    """
    start = time.perf_counter()
    state = init
    trace = []
    error = None
    try:
        for t in range(cfg.t_max + 1):
            w = penalty_weight(cfg, t)
            posed, contacts, n_perp, cols, report = _evaluate(model, state, obj, cfg)
            e_col = eval_e_col(cols)
            trace.append(
                TraceEntry(
                    t=t, w=w,
                    e_quality=report.e_quality,
                    e_penalty=e_col + report.e_cls,
                    e_col=e_col,
                    e_cls=report.e_cls,
                )
            )
            ppo_sys = build_ppo_system(contacts, cols, obj.center_of_mass, n_perp, w, cfg.beta)
            state = apply_palm_update(state, solve_ppo(ppo_sys))

            posed, contacts, n_perp, cols, _ = _evaluate(model, state, obj, cfg)
            jpo_sys = build_jpo_system(posed, contacts, cols, obj.center_of_mass, n_perp, w, cfg.beta)
            dq = solve_box_ls(jpo_sys, cfg.jpo_max_iterations, cfg.jpo_tolerance)
            state = apply_joint_update(state, dq, model)
    except FingraspError as exc:
        error = str(exc)
        log.warning("sample %d aborted: %s", sample_index, error)

    _, contacts, _, cols, report = _evaluate(model, state, obj, cfg)
    e_col = eval_e_col(cols)
    collision_free = cols.total_pairs == 0
    accepted = (
        error is None
        and collision_free
        and report.e_cls <= cfg.e_cls_tol
        and not contacts.any_fallback
    )
    return GraspResult(
        sample_index=sample_index,
        cluster_index=cluster_index,
        state=state,
        contacts=contacts,
        quality=report,
        e_col=e_col,
        collision_pairs=cols.total_pairs,
        collision_free=collision_free,
        accepted=accepted,
        trace=tuple(trace),
        wall_time=time.perf_counter() - start,
        error=error,
    )


def _run_sample(args) -> GraspResult:
    init, obj, model, cfg, sample_index, cluster_index = args
    try:
        return iterative_ppo_jpo(init, obj, model, cfg, sample_index, cluster_index)
    except FingraspError as exc:  # defensive: evaluation of the init state failed
        report = QualityReport(0.0, 0.0, 0.0, float("inf"), np.array([0.0, 0.0, 1.0]))
        empty = ContactSet(
            c=np.zeros((model.n_fingers, 3)),
            n_c=np.tile([0.0, 0.0, 1.0], (model.n_fingers, 1)),
            p_f=np.zeros((model.n_fingers, 3)),
            n_f=np.tile([0.0, 0.0, 1.0], (model.n_fingers, 1)),
            matched=tuple(np.zeros(0, dtype=np.int64) for _ in range(model.n_fingers)),
            fallback=np.ones(model.n_fingers, dtype=bool),
        )
        return GraspResult(
            sample_index=sample_index,
            cluster_index=cluster_index,
            state=init,
            contacts=empty,
            quality=report,
            e_col=float("inf"),
            collision_pairs=-1,
            collision_free=False,
            accepted=False,
            trace=(),
            wall_time=0.0,
            error=str(exc),
        )


def plan(obj: SurfacePointCloud, model: HandModel, cfg: PlannerConfig):
    """Run ``cfg.n_samples`` guided restarts; results sorted by quality error.

    Deterministic for a fixed (seed, workers): each batch of ``workers``
    initial states is drawn before any of its samples run, and sampler
    statistics are updated in sample order once the batch completes.
    """
    if cfg.n_samples == 0:
        return []
    k = min(cfg.k_clusters, len(obj))
    sampler = init_sampler(obj, k, cfg.seed)
    rng = np.random.default_rng(cfg.seed)

    results = []
    sample_index = 0
    pool = ProcessPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        while sample_index < cfg.n_samples:
            batch = []
            for _ in range(min(cfg.workers, cfg.n_samples - sample_index)):
                init, cluster = draw_initial_state(sampler, model, rng, cfg.standoff)
                batch.append((init, obj, model, cfg, sample_index, cluster))
                sample_index += 1
            if pool is None:
                batch_results = [_run_sample(args) for args in batch]
            else:
                batch_results = list(pool.map(_run_sample, batch))
            for res in batch_results:
                sampler.record(res.cluster_index, res.accepted)
                log.debug(
                    "sample %d: cluster %d accepted=%s e_quality=%.4g e_penalty=%.4g",
                    res.sample_index, res.cluster_index, res.accepted,
                    res.e_quality, res.e_penalty,
                )
                results.append(res)
    finally:
        if pool is not None:
            pool.shutdown()

    results.sort(key=lambda r: r.e_quality)
    return results
