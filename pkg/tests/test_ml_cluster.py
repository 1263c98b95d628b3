"""k-means behavior: planted-blob recovery, invariants, determinism."""

import numpy as np
import pytest

from datadesk.errors import MlError
from datadesk.ml import run_cluster

from oracles import ari


def _blobs(rng, centers, n_per, sigma):
    points = np.vstack([rng.normal(c, sigma, (n_per, len(c))) for c in centers])
    labels = [i for i, _ in enumerate(centers) for _ in range(n_per)]
    return points, labels


def test_k1_centroid_is_mean_and_inertia_is_total_variance():
    points = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]])
    result = run_cluster(points, 1, "KMeans", 42)
    assert np.allclose(result.centroids[0], points.mean(axis=0))
    expected_inertia = float(((points - points.mean(axis=0)) ** 2).sum())
    assert abs(result.inertia - expected_inertia) < 1e-12
    assert set(result.assignments.tolist()) == {0}


def test_three_planted_blobs_recovered():
    rng = np.random.default_rng(0)
    # 60 points, separation 10 sigma.
    points, labels = _blobs(rng, [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)], 20, 1.0)
    result = run_cluster(points, 3, "KMeans", 42)
    assert ari(labels, result.assignments) >= 0.99


def test_k_equals_n_gives_zero_inertia():
    points = np.array([[float(i), 0.0] for i in range(6)])
    result = run_cluster(points, 6, "KMeans", 42)
    assert result.inertia < 1e-18
    assert sorted(result.assignments.tolist()) == list(range(6))


def test_inertia_non_increasing_within_every_run():
    rng = np.random.default_rng(3)
    points = rng.normal(0, 1, (80, 4))
    result = run_cluster(points, 5, "KMeans", 42)
    history = result.inertia_history
    assert all(history[i + 1] <= history[i] + 1e-9 for i in range(len(history) - 1))


def test_row_permutation_invariance_up_to_relabeling():
    rng = np.random.default_rng(5)
    points, _ = _blobs(rng, [(0.0, 0.0), (8.0, 8.0)], 15, 0.5)
    base = run_cluster(points, 2, "KMeans", 42)
    perm = np.random.default_rng(9).permutation(len(points))
    permuted = run_cluster(points[perm], 2, "KMeans", 42)
    # Compare partitions, not ids.
    assert ari(base.assignments[perm], permuted.assignments) == 1.0


def test_seeded_determinism_is_bit_identical():
    rng = np.random.default_rng(1)
    points = rng.normal(0, 1, (50, 3))
    a = run_cluster(points, 4, "KMeans", 42)
    b = run_cluster(points, 4, "KMeans", 42)
    assert np.array_equal(a.assignments, b.assignments)
    assert np.array_equal(a.centroids, b.centroids)
    assert a.inertia == b.inertia
    c = run_cluster(points, 4, "KMeans", 43)
    assert a.inertia != c.inertia or not np.array_equal(a.assignments, c.assignments)


def test_k_larger_than_n_rejected():
    with pytest.raises(MlError, match="3 clusters from 2 rows"):
        run_cluster(np.zeros((2, 2)), 3, "KMeans", 42)


def test_unknown_algorithm_names_supported_set():
    with pytest.raises(MlError, match="KMeans"):
        run_cluster(np.zeros((3, 2)), 2, "DBSCAN", 42)


def test_k_below_one_rejected():
    with pytest.raises(MlError, match="at least 1"):
        run_cluster(np.zeros((3, 2)), 0, "KMeans", 42)


def test_duplicate_points_do_not_crash_init():
    points = np.array([[1.0, 1.0]] * 10 + [[5.0, 5.0]] * 10)
    result = run_cluster(points, 2, "KMeans", 42)
    assert result.inertia < 1e-18
