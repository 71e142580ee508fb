"""Lloyd k-means with k-means++ seeding, used by the guided sampler."""

from __future__ import annotations

import numpy as np

from ..errors import FingraspError

MAX_LLOYD_ITERATIONS = 100


def _kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centers = np.empty((k, 3))
    centers[0] = points[rng.integers(len(points))]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[j:] = points[rng.integers(len(points), size=k - j)]
            break
        centers[j] = points[rng.choice(len(points), p=d2 / total)]
        d2 = np.minimum(d2, np.sum((points - centers[j]) ** 2, axis=1))
    return centers


def _assign(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    return np.argmin(d2, axis=1)


def kmeans(points: np.ndarray, k: int, seed: int, return_labels: bool = False):
    """Cluster ``points`` into ``k`` centers; deterministic for a fixed seed.

    Runs Lloyd iterations to a fixed point of the assignment, capped at
    MAX_LLOYD_ITERATIONS. Empty clusters are reseeded to the point currently
    farthest from its assigned center.
    """
    points = np.asarray(points, dtype=float)
    if k > len(points):
        raise FingraspError(f"k={k} exceeds point count {len(points)}")
    if k < 1:
        raise FingraspError("k must be >= 1")
    rng = np.random.default_rng(seed)
    centers = _kmeanspp_init(points, k, rng)

    labels = _assign(points, centers)
    for _ in range(MAX_LLOYD_ITERATIONS):
        for j in range(k):
            members = points[labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)
            else:
                dist = np.linalg.norm(points - centers[labels], axis=1)
                far = int(np.argmax(dist))
                centers[j] = points[far]
                labels[far] = j
        new_labels = _assign(points, centers)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels

    if return_labels:
        return centers, labels
    return centers
