"""k-means over the embedding space, with careful seeding and the elbow
scan used to pick the number of subfields."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import KTooLarge


@dataclass
class ClusterModel:
    k: int
    centroids: np.ndarray          # (k, d)
    labels: np.ndarray             # (n,) ints in [0, k)
    inertia: float                 # sum of squared point-to-centroid distances
    seed: int
    n_iters: int = 0
    inertia_history: list[float] = field(default_factory=list)


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """(n, k) squared Euclidean distances, computed the direct way to keep
    tiny negative round-off out of the inertia."""
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: next center drawn with probability proportional to
    the squared distance to the nearest chosen center."""
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = points[first]
    closest = _squared_distances(points, centroids[:1]).ravel()
    for c in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            # Remaining points coincide with chosen centers; pick uniformly.
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=closest / total))
        centroids[c] = points[idx]
        d_new = _squared_distances(points, centroids[c:c + 1]).ravel()
        closest = np.minimum(closest, d_new)
    return centroids


def kmeans_fit(
    vectors: np.ndarray,
    k: int,
    seed: int = 0,
    max_iters: int = 300,
    tol: float = 1e-6,
    init_centroids: np.ndarray | None = None,
) -> ClusterModel:
    """Lloyd iterations from a k-means++ start.

    Deterministic for a fixed seed. Empty clusters are re-seeded to the
    point currently farthest from its assigned centroid, which can only
    lower the objective. ``inertia_history`` records the objective after
    each assignment step and is non-increasing.
    """
    points = np.asarray(vectors, dtype=float)
    n = points.shape[0]
    if k > n:
        raise KTooLarge(f"k={k} exceeds the number of points {n}")
    if k < 1:
        raise ValueError("k must be >= 1")
    if not np.all(np.isfinite(points)):
        raise ValueError("vectors must be finite")

    rng = np.random.default_rng(seed)
    if init_centroids is not None:
        centroids = np.array(init_centroids, dtype=float, copy=True)
        if centroids.shape != (k, points.shape[1]):
            raise ValueError("init_centroids has wrong shape")
    else:
        centroids = _kmeans_pp_init(points, k, rng)

    history: list[float] = []
    labels = np.zeros(n, dtype=np.int64)
    n_iters = 0
    for n_iters in range(1, max_iters + 1):
        d2 = _squared_distances(points, centroids)
        labels = d2.argmin(axis=1)
        history.append(float(d2[np.arange(n), labels].sum()))

        new_centroids = centroids.copy()
        counts = np.bincount(labels, minlength=k)
        for c in range(k):
            if counts[c] > 0:
                new_centroids[c] = points[labels == c].mean(axis=0)
        reseeded = False
        if np.any(counts == 0):
            # Re-seed each empty cluster to the point farthest from its
            # assigned centroid, excluding points already consumed.
            point_d2 = d2[np.arange(n), labels]
            taken: set[int] = set()
            for c in np.flatnonzero(counts == 0):
                candidates = [i for i in np.argsort(point_d2)[::-1] if i not in taken]
                idx = int(candidates[0])
                taken.add(idx)
                new_centroids[c] = points[idx]
                labels[idx] = c
                reseeded = True

        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if not reseeded and shift < tol:
            break

    # Labels were produced under the pre-update centroids; recompute the
    # final assignment and means once so labels, centroids, and inertia agree.
    d2 = _squared_distances(points, centroids)
    labels = d2.argmin(axis=1)
    for c in range(k):
        mask = labels == c
        if mask.any():
            centroids[c] = points[mask].mean(axis=0)
    d2 = _squared_distances(points, centroids)
    inertia = float(d2[np.arange(n), labels].sum())
    history.append(inertia)

    return ClusterModel(
        k=k,
        centroids=centroids,
        labels=labels,
        inertia=inertia,
        seed=seed,
        n_iters=n_iters,
        inertia_history=history,
    )


def best_kmeans(
    vectors: np.ndarray,
    k: int,
    restarts: int = 10,
    base_seed: int = 0,
    max_iters: int = 300,
    tol: float = 1e-6,
) -> ClusterModel:
    """Lowest-inertia fit across seeded restarts; robust against the odd
    poor initialization while staying deterministic in the base seed."""
    fits = [
        kmeans_fit(vectors, k, seed=base_seed + i, max_iters=max_iters, tol=tol)
        for i in range(max(1, restarts))
    ]
    return min(fits, key=lambda m: m.inertia)


def elbow_scan(
    vectors: np.ndarray,
    k_range,
    seeds_per_k: int = 10,
    base_seed: int = 0,
    max_iters: int = 300,
    tol: float = 1e-6,
) -> list[tuple[int, float]]:
    """Best-of-seeds inertia for each k, scanned in ascending order.

    Besides the seeded restarts, each k also tries a warm start built from
    the previous k's best model plus one extra centroid at the farthest
    point, which guarantees the reported curve is non-increasing in k.
    """
    points = np.asarray(vectors, dtype=float)
    ks = sorted(set(int(k) for k in k_range))
    n = points.shape[0]
    for k in ks:
        if k > n:
            raise KTooLarge(f"k={k} exceeds the number of points {n}")

    results: list[tuple[int, float]] = []
    previous_best: ClusterModel | None = None
    for k in ks:
        candidates = [
            kmeans_fit(points, k, seed=base_seed + i, max_iters=max_iters, tol=tol)
            for i in range(seeds_per_k)
        ]
        if previous_best is not None and previous_best.k == k - 1:
            d2 = _squared_distances(points, previous_best.centroids)
            farthest = int(d2[np.arange(n), previous_best.labels].argmax())
            warm = np.vstack([previous_best.centroids, points[farthest]])
            candidates.append(
                kmeans_fit(points, k, seed=base_seed, max_iters=max_iters, tol=tol,
                           init_centroids=warm)
            )
        best = min(candidates, key=lambda m: m.inertia)
        results.append((k, best.inertia))
        previous_best = best
    return results
