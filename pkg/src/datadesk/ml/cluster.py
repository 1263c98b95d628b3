"""Seeded k-means: k-means++ initialization plus Lloyd iterations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import MlError

MAX_ITERATIONS = 100
SHIFT_TOLERANCE = 1e-6
N_INIT = 10


@dataclass
class KMeansResult:
    assignments: np.ndarray        # shape (n,), cluster ids dense in [0, k)
    centroids: np.ndarray          # shape (k, d)
    inertia: float                 # sum of squared distances to assigned centroids
    iterations: int
    inertia_history: list[float] = field(default_factory=list)


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, shape (n, k)."""
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _init_plus_plus(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = points[first]
    closest = ((points - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = float(closest.sum())
        if total == 0.0:
            # All remaining points coincide with a centroid; any choice works.
            choice = int(rng.integers(n))
        else:
            choice = int(rng.choice(n, p=closest / total))
        centroids[j] = points[choice]
        closest = np.minimum(closest, ((points - centroids[j]) ** 2).sum(axis=1))
    return centroids


def run_cluster(
    points: np.ndarray,
    k: int,
    algorithm: str = "KMeans",
    seed: int = 42,
    n_init: int = N_INIT,
) -> KMeansResult:
    """Cluster rows of ``points`` into k groups.

    Lloyd's algorithm with k-means++ initialization, at most 100 iterations
    per restart, convergence when the largest centroid shift drops below
    1e-6. Runs n_init seeded restarts and keeps the lowest-inertia solution;
    inertia is checked to be non-increasing within every run.
    """
    if algorithm.lower() != "kmeans":
        raise MlError(f"unknown clustering algorithm {algorithm!r}; supported: KMeans")
    n = int(points.shape[0])
    if k < 1:
        raise MlError(f"cluster count must be at least 1, got {k}")
    if k > n:
        raise MlError(f"cannot form {k} clusters from {n} rows")

    best: KMeansResult | None = None
    for child_seed in np.random.SeedSequence(seed).spawn(max(1, n_init)):
        result = _lloyd_once(points, k, np.random.Generator(np.random.PCG64(child_seed)))
        if best is None or result.inertia < best.inertia:
            best = result
    return best


def _lloyd_once(points: np.ndarray, k: int, rng: np.random.Generator) -> KMeansResult:
    n = int(points.shape[0])
    centroids = _init_plus_plus(points, k, rng)

    history: list[float] = []
    assignments = np.zeros(n, dtype=np.int64)
    iterations = 0
    for iterations in range(1, MAX_ITERATIONS + 1):
        d2 = _squared_distances(points, centroids)
        assignments = d2.argmin(axis=1)
        inertia = float(d2[np.arange(n), assignments].sum())
        if history and inertia > history[-1] + 1e-9 * max(1.0, history[-1]):
            raise MlError(
                f"k-means inertia increased ({history[-1]} -> {inertia}); this is a bug"
            )
        history.append(inertia)

        new_centroids = centroids.copy()
        for j in range(k):
            members = points[assignments == j]
            if len(members):
                new_centroids[j] = members.mean(axis=0)
            else:
                # Re-seed an emptied cluster with the point farthest from its
                # assigned centroid.
                farthest = int(d2[np.arange(n), assignments].argmax())
                new_centroids[j] = points[farthest]
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if shift < SHIFT_TOLERANCE:
            break

    d2 = _squared_distances(points, centroids)
    assignments = d2.argmin(axis=1)
    inertia = float(d2[np.arange(n), assignments].sum())
    if history and inertia > history[-1] + 1e-9 * max(1.0, history[-1]):
        raise MlError(f"k-means inertia increased ({history[-1]} -> {inertia}); this is a bug")
    history.append(inertia)
    return KMeansResult(assignments, centroids, inertia, iterations, history)
