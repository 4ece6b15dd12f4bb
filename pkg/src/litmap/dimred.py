"""Projects the 768-dimensional embedding set to 2D.

The pipeline follows the standard fuzzy-neighborhood construction: exact
brute-force kNN (desk-scale corpora make O(n^2) viable and exactly
testable), smooth-kNN bandwidth calibration, fuzzy union symmetrization,
and stochastic gradient layout with negative sampling.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit
from scipy.optimize import curve_fit

from .errors import IoFailure, MalformedRecord, TooFewPoints

MIN_SIGMA = 1e-3
MAX_SIGMA = 1e6
CALIBRATION_TOL = 1e-5
MAX_BISECTION_ITERS = 64
INIT_RANGE = 10.0  # layout initialized uniformly in [-INIT_RANGE, INIT_RANGE]^2


@lru_cache(maxsize=16)
def fit_curve_params(min_dist: float, spread: float = 1.0) -> tuple[float, float]:
    """Least-squares fit of the low-dimensional similarity curve
    1 / (1 + a * d^(2b)) to an offset exponential with the given min_dist."""

    def curve(x, a, b):
        return 1.0 / (1.0 + a * x ** (2 * b))

    xs = np.linspace(0.0, spread * 3.0, 300)
    ys = np.where(xs < min_dist, 1.0, np.exp(-(xs - min_dist) / spread))
    (a, b), _ = curve_fit(curve, xs, ys)
    return float(a), float(b)


@dataclass
class DimRedConfig:
    n_neighbors: int = 250
    n_epochs: int = 200
    min_dist: float = 0.1
    a: float | None = None
    b: float | None = None
    negative_sample_rate: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.n_neighbors < 2:
            raise ValueError("n_neighbors must be >= 2")
        if self.n_epochs < 1:
            raise ValueError("n_epochs must be >= 1")
        if self.min_dist <= 0:
            raise ValueError("min_dist must be positive")
        if self.negative_sample_rate < 1:
            raise ValueError("negative sample rate must be >= 1")

    def curve_params(self) -> tuple[float, float]:
        if self.a is None or self.b is None:
            self.a, self.b = fit_curve_params(self.min_dist)
        return self.a, self.b


@dataclass
class KnnGraph:
    """Per point: the k nearest neighbor indices and ascending distances,
    plus (after calibration) rho and sigma."""

    indices: np.ndarray      # (n, k) int
    distances: np.ndarray    # (n, k) float, ascending per row
    rho: np.ndarray | None = None
    sigma: np.ndarray | None = None

    @property
    def n_points(self) -> int:
        return self.indices.shape[0]

    @property
    def k(self) -> int:
        return self.indices.shape[1]


@dataclass
class FuzzyGraph:
    """Symmetric sparse membership weights, stored once per unordered pair."""

    n_points: int
    heads: np.ndarray    # (E,) int, heads[e] < tails[e]
    tails: np.ndarray    # (E,) int
    weights: np.ndarray  # (E,) float in [0, 1]
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {
            (int(i), int(j)): float(w)
            for i, j, w in zip(self.heads, self.tails, self.weights)
        }

    def membership(self, i: int, j: int) -> float:
        """mu(i, j); exactly symmetric because each pair is stored once."""
        key = (i, j) if i < j else (j, i)
        return self._index.get(key, 0.0)

    @property
    def n_edges(self) -> int:
        return len(self.weights)


@dataclass
class Projection2D:
    """Finite 2D coordinates keyed by document id."""

    coords: dict[str, tuple[float, float]]

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, doc_id: str) -> tuple[float, float]:
        return self.coords[doc_id]

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.coords


def knn_brute_force(vectors: np.ndarray, k: int) -> KnnGraph:
    """Exact k nearest neighbors by Euclidean distance.

    Ties break toward the lower point index. Self is excluded by index, so
    duplicate points appear as neighbors at distance zero.
    """
    vectors = np.ascontiguousarray(vectors, dtype=float)
    n = vectors.shape[0]
    if n < 2:
        raise TooFewPoints(f"need at least 2 points, got {n}")
    if not 1 <= k < n:
        raise TooFewPoints(f"need 1 <= k < n, got k={k} for n={n}")

    indices = np.empty((n, k), dtype=np.int64)
    distances = np.empty((n, k), dtype=float)
    order_index = np.arange(n)
    for i in range(n):
        diff = vectors - vectors[i]
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        # lexsort: primary key distance, secondary key index; drop self.
        order = np.lexsort((order_index, dist))
        order = order[order != i][:k]
        indices[i] = order
        distances[i] = dist[order]
    return KnnGraph(indices=indices, distances=distances)


def _solve_sigma(distances: np.ndarray, rho: float, target: float) -> float:
    """Expanding bisection for Sum_j exp(-max(0, d_j - rho) / sigma) = target."""
    shifted = np.maximum(distances - rho, 0.0)
    lo, hi, mid = 0.0, math.inf, 1.0
    for _ in range(MAX_BISECTION_ITERS):
        value = float(np.exp(-shifted / mid).sum())
        if abs(value - target) <= CALIBRATION_TOL:
            break
        if value > target:
            hi = mid
            mid = (lo + hi) / 2.0
        else:
            lo = mid
            mid = mid * 2.0 if hi == math.inf else (lo + hi) / 2.0
    return min(max(mid, MIN_SIGMA), MAX_SIGMA)


def calibrate_smooth_knn(graph: KnnGraph, k: int | None = None) -> KnnGraph:
    """Fill in rho (first positive neighbor distance) and sigma (bandwidth
    solving the smooth-kNN equation with target log2(k), clamped to
    [MIN_SIGMA, MAX_SIGMA])."""
    if k is None:
        k = graph.k
    target = math.log2(k)
    n = graph.n_points
    rho = np.zeros(n)
    sigma = np.zeros(n)
    for i in range(n):
        row = graph.distances[i]
        positive = row[row > 0.0]
        rho[i] = positive[0] if positive.size else 0.0
        sigma[i] = _solve_sigma(row, rho[i], target)
    return KnnGraph(indices=graph.indices, distances=graph.distances, rho=rho, sigma=sigma)


def fuzzy_union(graph: KnnGraph) -> FuzzyGraph:
    """Directed weights w(i->j) = exp(-max(0, d - rho_i) / sigma_i),
    symmetrized as mu = w_ij + w_ji - w_ij * w_ji."""
    if graph.rho is None or graph.sigma is None:
        raise ValueError("graph must be calibrated first")
    directed: dict[tuple[int, int], float] = {}
    n = graph.n_points
    for i in range(n):
        for j, d in zip(graph.indices[i], graph.distances[i]):
            w = math.exp(-max(0.0, float(d) - float(graph.rho[i])) / float(graph.sigma[i]))
            directed[(i, int(j))] = w

    merged: dict[tuple[int, int], float] = {}
    for (i, j), w_ij in directed.items():
        key = (i, j) if i < j else (j, i)
        if key in merged:
            continue
        w_ji = directed.get((j, i), 0.0)
        merged[key] = w_ij + w_ji - w_ij * w_ji

    pairs = sorted(merged.items())
    heads = np.array([p[0][0] for p in pairs], dtype=np.int64)
    tails = np.array([p[0][1] for p in pairs], dtype=np.int64)
    weights = np.array([p[1] for p in pairs], dtype=float)
    return FuzzyGraph(n_points=n, heads=heads, tails=tails, weights=weights)


@njit(cache=True)
def _sgd_layout(positions, heads, tails, epochs_per_sample, a, b,
                n_epochs, negative_sample_rate, seed):
    n = positions.shape[0]
    gamma = 1.0
    np.random.seed(seed)
    epochs_per_negative = epochs_per_sample / negative_sample_rate
    epoch_of_next_sample = epochs_per_sample.copy()
    epoch_of_next_negative = epochs_per_negative.copy()

    for epoch in range(n_epochs):
        alpha = 1.0 - epoch / n_epochs
        for e in range(heads.shape[0]):
            if epoch_of_next_sample[e] > epoch:
                continue
            j = heads[e]
            k = tails[e]
            dx = positions[j, 0] - positions[k, 0]
            dy = positions[j, 1] - positions[k, 1]
            dist2 = dx * dx + dy * dy
            if dist2 > 0.0:
                coeff = (-2.0 * a * b * dist2 ** (b - 1.0)) / (a * dist2 ** b + 1.0)
            else:
                coeff = 0.0
            gx = min(max(coeff * dx, -4.0), 4.0)
            gy = min(max(coeff * dy, -4.0), 4.0)
            positions[j, 0] += alpha * gx
            positions[j, 1] += alpha * gy
            positions[k, 0] -= alpha * gx
            positions[k, 1] -= alpha * gy
            epoch_of_next_sample[e] += epochs_per_sample[e]

            n_neg = int((epoch - epoch_of_next_negative[e]) / epochs_per_negative[e])
            for _ in range(n_neg):
                other = np.random.randint(0, n)
                if other == j:
                    continue
                dx = positions[j, 0] - positions[other, 0]
                dy = positions[j, 1] - positions[other, 1]
                dist2 = dx * dx + dy * dy
                if dist2 > 0.0:
                    coeff = (2.0 * gamma * b) / ((0.001 + dist2) * (a * dist2 ** b + 1.0))
                    gx = min(max(coeff * dx, -4.0), 4.0)
                    gy = min(max(coeff * dy, -4.0), 4.0)
                else:
                    gx = 4.0
                    gy = 4.0
                positions[j, 0] += alpha * gx
                positions[j, 1] += alpha * gy
            epoch_of_next_negative[e] += n_neg * epochs_per_negative[e]
    return positions


def optimize_layout(fuzzy: FuzzyGraph, cfg: DimRedConfig) -> np.ndarray:
    """Seeded stochastic layout of the fuzzy graph into 2D.

    Edges are sampled with frequency proportional to their membership
    weight; each attractive update also triggers repulsive updates against
    negative samples. The learning rate decays linearly from 1 toward 0.
    Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(cfg.seed)
    positions = rng.uniform(-INIT_RANGE, INIT_RANGE, size=(fuzzy.n_points, 2))
    if fuzzy.n_edges == 0:
        return positions

    a, b = cfg.curve_params()
    # Memberships that underflowed to zero would never be sampled anyway.
    live = fuzzy.weights > 0.0
    if not live.any():
        return positions
    # Each unordered pair becomes two directed entries, mirroring the usual
    # symmetric-matrix walk, so both endpoints lead updates equally often.
    heads = np.concatenate([fuzzy.heads[live], fuzzy.tails[live]])
    tails = np.concatenate([fuzzy.tails[live], fuzzy.heads[live]])
    weights = np.concatenate([fuzzy.weights[live], fuzzy.weights[live]])
    epochs_per_sample = weights.max() / weights

    return _sgd_layout(
        positions,
        heads.astype(np.int64),
        tails.astype(np.int64),
        epochs_per_sample.astype(float),
        float(a),
        float(b),
        int(cfg.n_epochs),
        float(cfg.negative_sample_rate),
        int(cfg.seed) & 0xFFFFFFFF,
    )


def project(ids: Sequence[str], vectors: np.ndarray, cfg: DimRedConfig) -> Projection2D:
    """Full pipeline: kNN graph, calibration, fuzzy union, layout."""
    n = len(ids)
    if n != vectors.shape[0]:
        raise ValueError("ids and vectors disagree in length")
    if n == 0:
        return Projection2D(coords={})

    rng = np.random.default_rng(cfg.seed)
    if n == 1:
        x, y = rng.uniform(-INIT_RANGE, INIT_RANGE, size=2)
        return Projection2D(coords={ids[0]: (float(x), float(y))})

    k = cfg.n_neighbors
    if k >= n:
        warnings.warn(
            f"n_neighbors={k} >= number of points {n}; reducing to {n - 1}",
            stacklevel=2,
        )
        k = n - 1

    graph = knn_brute_force(vectors, k)
    graph = calibrate_smooth_knn(graph, k)
    fuzzy = fuzzy_union(graph)
    positions = optimize_layout(fuzzy, cfg)
    return Projection2D(coords={
        doc_id: (float(x), float(y)) for doc_id, (x, y) in zip(ids, positions)
    })


def save_projection(projection: Projection2D, path: str | Path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for doc_id, (x, y) in projection.coords.items():
                fh.write(json.dumps({"id": doc_id, "x": x, "y": y}))
                fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write projection to {path}: {exc}") from exc


def load_projection(path: str | Path) -> Projection2D:
    coords: dict[str, tuple[float, float]] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_number, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    coords[rec["id"]] = (float(rec["x"]), float(rec["y"]))
                except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                    raise MalformedRecord(line_number, str(exc)) from exc
    except OSError as exc:
        raise IoFailure(f"cannot read projection from {path}: {exc}") from exc
    return Projection2D(coords=coords)
