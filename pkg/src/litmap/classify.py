"""Relevance classifier: logistic regression over document embeddings,
ranking-quality evaluation, and threshold filtering of fresh listings."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ClassTooSmall, DegenerateInput, IoFailure, MalformedRecord, OneClassOnly

HISTOGRAM_BINS = 20


@dataclass
class LabeledSet:
    """Vectors with binary labels; 1 marks the relevant (positive) class."""

    vectors: np.ndarray   # (n, d)
    labels: np.ndarray    # (n,) ints in {0, 1}

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=float)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.vectors.shape[0] != self.labels.shape[0]:
            raise ValueError("vectors and labels disagree in length")
        if not set(np.unique(self.labels)) <= {0, 1}:
            raise ValueError("labels must be 0 or 1")

    def __len__(self) -> int:
        return len(self.labels)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[np.ndarray, int]]) -> "LabeledSet":
        pairs = list(pairs)
        if not pairs:
            return cls(np.zeros((0, 0)), np.zeros(0, dtype=np.int64))
        return cls(np.stack([v for v, _ in pairs]), np.array([y for _, y in pairs]))


@dataclass
class SplitConfig:
    train_fraction: float = 0.8
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train fraction must lie in (0, 1)")


@dataclass
class LogRegModel:
    weights: np.ndarray
    bias: float
    iterations: int = 0
    final_loss: float = float("nan")
    loss_history: list[float] = field(default_factory=list, repr=False)


@dataclass
class FilterConfig:
    threshold: float = 0.75
    strict: bool = True  # accept score strictly above the threshold

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")


def split(labeled: LabeledSet, cfg: SplitConfig) -> tuple[LabeledSet, LabeledSet]:
    """Deterministic train/test partition; when stratified, each class is
    split independently with test sizes rounded down."""
    rng = np.random.default_rng(cfg.seed)
    test_frac = 1.0 - cfg.train_fraction

    if cfg.stratified:
        groups = [np.flatnonzero(labeled.labels == y) for y in (0, 1)]
    else:
        groups = [np.arange(len(labeled))]

    train_idx: list[np.ndarray] = []
    test_idx: list[np.ndarray] = []
    for idx in groups:
        if len(idx) < 2:
            raise ClassTooSmall(f"a class has only {len(idx)} member(s); need at least 2")
        shuffled = rng.permutation(idx)
        # round before flooring so 10 * (1 - 0.8) lands on 2, not 1.999...
        n_test = int(math.floor(round(len(idx) * test_frac, 9)))
        test_idx.append(shuffled[:n_test])
        train_idx.append(shuffled[n_test:])

    train = np.concatenate(train_idx)
    test = np.concatenate(test_idx)
    return (
        LabeledSet(labeled.vectors[train], labeled.labels[train]),
        LabeledSet(labeled.vectors[test], labeled.labels[test]),
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    positive = z >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-z[positive]))
    ez = np.exp(z[~positive])
    out[~positive] = ez / (1.0 + ez)
    return out


def log_loss(weights: np.ndarray, bias: float, x: np.ndarray, y: np.ndarray,
             l2: float = 0.0) -> float:
    """Mean negative log-likelihood, computed in the stable log1p form."""
    z = x @ weights + bias
    per_sample = np.logaddexp(0.0, -z * (2 * y - 1))
    penalty = 0.5 * l2 * float(weights @ weights)
    return float(per_sample.mean() + penalty)


def log_loss_gradient(weights: np.ndarray, bias: float, x: np.ndarray, y: np.ndarray,
                      l2: float = 0.0) -> tuple[np.ndarray, float]:
    residual = _sigmoid(x @ weights + bias) - y
    grad_w = x.T @ residual / len(y) + l2 * weights
    grad_b = float(residual.mean())
    return grad_w, grad_b


def fit_logreg(
    train: LabeledSet,
    max_iters: int = 1000,
    lr: float = 0.1,
    tol: float = 1e-7,
    l2: float = 0.0,
) -> LogRegModel:
    """Full-batch gradient descent on the mean log-loss from zero weights.

    Stops when the gradient norm drops below ``tol`` or the iteration cap is
    reached. The per-iteration loss is recorded and must not increase; if a
    step ever raises the loss, it is rolled back and the step size halved.
    """
    x, y = train.vectors, train.labels.astype(float)
    if not np.all(np.isfinite(x)):
        raise DegenerateInput("training vectors contain non-finite values")
    classes = set(np.unique(train.labels))
    if classes != {0, 1}:
        raise ClassTooSmall(f"training needs both classes, got labels {sorted(classes)}")

    weights = np.zeros(x.shape[1])
    bias = 0.0
    loss = log_loss(weights, bias, x, y, l2)
    history = [loss]
    step = lr
    iterations = 0
    for iterations in range(1, max_iters + 1):
        grad_w, grad_b = log_loss_gradient(weights, bias, x, y, l2)
        grad_norm = float(np.sqrt(grad_w @ grad_w + grad_b * grad_b))
        if grad_norm < tol:
            iterations -= 1
            break
        new_weights = weights - step * grad_w
        new_bias = bias - step * grad_b
        new_loss = log_loss(new_weights, new_bias, x, y, l2)
        if new_loss > loss:
            step /= 2.0
            warnings.warn(
                f"log-loss increased at iteration {iterations}; halving step to {step}",
                stacklevel=2,
            )
            continue
        weights, bias, loss = new_weights, new_bias, new_loss
        history.append(loss)

    return LogRegModel(
        weights=weights,
        bias=bias,
        iterations=iterations,
        final_loss=loss,
        loss_history=history,
    )


def predict_proba(model: LogRegModel, vector: np.ndarray) -> float:
    """sigmoid(w . x + b) for one vector."""
    return float(_sigmoid(np.atleast_1d(np.asarray(vector) @ model.weights + model.bias))[0])


def predict_proba_many(model: LogRegModel, vectors: np.ndarray) -> np.ndarray:
    return _sigmoid(np.asarray(vectors) @ model.weights + model.bias)


def roc_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Probability that a random positive outscores a random negative, with
    ties counted one half. Exact: group-counted over the sorted scores."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=np.int64)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise OneClassOnly("need both a positive and a negative example")

    order = np.argsort(scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]

    wins = 0.0
    negatives_below = 0
    i = 0
    n = len(scores)
    while i < n:
        j = i
        while j < n and sorted_scores[j] == sorted_scores[i]:
            j += 1
        group_pos = int((sorted_labels[i:j] == 1).sum())
        group_neg = (j - i) - group_pos
        wins += group_pos * negatives_below + 0.5 * group_pos * group_neg
        negatives_below += group_neg
        i = j
    return wins / (n_pos * n_neg)


def filter_candidates(
    model: LogRegModel,
    candidates: Sequence[tuple],
    cfg: FilterConfig,
) -> list[tuple]:
    """Keep candidates whose score clears the threshold.

    ``candidates`` is a sequence of (item, vector) pairs; the result is
    (item, score) pairs ordered by descending score. With ``strict`` the
    cutoff is exclusive: a score exactly at the threshold is rejected.
    """
    accepted = []
    for item, vector in candidates:
        score = predict_proba(model, vector)
        keep = score > cfg.threshold if cfg.strict else score >= cfg.threshold
        if keep:
            accepted.append((item, score))
    accepted.sort(key=lambda pair: (-pair[1], _sort_key(pair[0])))
    return accepted


def _sort_key(item) -> str:
    return getattr(item, "id", None) or str(item)


@dataclass
class EvalReport:
    auc: float
    histograms: dict[str, np.ndarray]      # per set: HISTOGRAM_BINS counts
    bin_edges: np.ndarray                  # shared edges over [0, 1]


def evaluate(
    model: LogRegModel,
    test: LabeledSet,
    extra_sets: dict[str, np.ndarray] | None = None,
) -> EvalReport:
    """Ranking quality on the held-out split plus score histograms for the
    positive class, negative class, and any extra vector sets."""
    scores = predict_proba_many(model, test.vectors)
    auc = roc_auc(scores, test.labels)

    edges = np.linspace(0.0, 1.0, HISTOGRAM_BINS + 1)
    histograms: dict[str, np.ndarray] = {}
    for name, mask in (("positive", test.labels == 1), ("negative", test.labels == 0)):
        histograms[name], _ = np.histogram(scores[mask], bins=edges)
    for name, vectors in (extra_sets or {}).items():
        histograms[name], _ = np.histogram(predict_proba_many(model, vectors), bins=edges)
    return EvalReport(auc=auc, histograms=histograms, bin_edges=edges)


# --- model persistence ------------------------------------------------------

def save_model(model: LogRegModel, path: str | Path) -> None:
    """Plain-text format: a four-line header (dimension, bias, iterations,
    loss) followed by one weight per line."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"dimension {len(model.weights)}\n")
            fh.write(f"bias {float(model.bias)!r}\n")
            fh.write(f"iterations {model.iterations}\n")
            fh.write(f"loss {float(model.final_loss)!r}\n")
            for w in model.weights:
                fh.write(f"{float(w)!r}\n")
    except OSError as exc:
        raise IoFailure(f"cannot write model to {path}: {exc}") from exc


def load_model(path: str | Path) -> LogRegModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read model from {path}: {exc}") from exc
    try:
        header = dict(line.split(" ", 1) for line in lines[:4])
        dimension = int(header["dimension"])
        bias = float(header["bias"])
        iterations = int(header["iterations"])
        loss = float(header["loss"])
        weights = np.array([float(line) for line in lines[4:4 + dimension]])
    except (KeyError, ValueError, IndexError) as exc:
        raise MalformedRecord(1, f"bad model file: {exc}") from exc
    if len(weights) != dimension:
        raise MalformedRecord(4 + len(weights), "missing weight lines")
    return LogRegModel(weights=weights, bias=bias, iterations=iterations, final_loss=loss)
