"""Cluster the coefficient matrix and score against ground-truth topics.

Documents live in the columns of ``W``; K-means groups them, an optimal
assignment aligns cluster indices with topic indices, and accuracy is the
matched fraction.  Everything is deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = [
    "LabelAssignment",
    "EvalReport",
    "kmeans",
    "hungarian_match",
    "confusion_matrix",
    "evaluate",
    "accuracy",
]


@dataclass(frozen=True, eq=False)
class LabelAssignment:
    """Predicted cluster indices and ground-truth topic indices, both in [0, K)."""

    predicted: np.ndarray
    truth: np.ndarray

    def __post_init__(self):
        predicted = np.asarray(self.predicted, dtype=np.int64)
        truth = np.asarray(self.truth, dtype=np.int64)
        if predicted.ndim != 1 or truth.ndim != 1:
            raise ValueError("label lists must be 1-dimensional")
        if predicted.shape[0] != truth.shape[0]:
            raise ValueError(
                f"length mismatch: {predicted.shape[0]} predicted labels vs "
                f"{truth.shape[0]} ground-truth labels"
            )
        if predicted.size == 0:
            raise ValueError("label lists are empty")
        if predicted.min() < 0 or truth.min() < 0:
            raise ValueError("labels must be nonnegative integers")
        object.__setattr__(self, "predicted", predicted)
        object.__setattr__(self, "truth", truth)

    @property
    def n_classes(self) -> int:
        return int(max(self.predicted.max(), self.truth.max())) + 1

    def __len__(self) -> int:
        return int(self.predicted.shape[0])


@dataclass(eq=False)
class EvalReport:
    """Accuracy plus the cluster-to-topic mapping and confusion counts."""

    accuracy: float
    mapping: np.ndarray
    confusion: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "accuracy": float(self.accuracy),
            "mapping": [int(v) for v in self.mapping],
            "confusion": [[int(v) for v in row] for row in self.confusion],
        }


def _kmeanspp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)
        centers[j] = points[idx]
        d2 = np.minimum(d2, ((points - centers[j]) ** 2).sum(axis=1))
    return centers


def _lloyd(
    points: np.ndarray, k: int, rng: np.random.Generator, max_iters: int
) -> tuple[np.ndarray, float, np.ndarray]:
    """One seeded K-means run; returns labels, final WCSS and the WCSS trace."""
    n = points.shape[0]
    centers = _kmeanspp(points, k, rng)
    sq_points = (points * points).sum(axis=1)
    labels = np.full(n, -1, dtype=np.int64)
    trace: list[float] = []
    for _ in range(max_iters):
        d2 = sq_points[:, None] - 2.0 * points @ centers.T + (centers * centers).sum(axis=1)
        d2 = np.maximum(d2, 0.0)
        new_labels = np.argmin(d2, axis=1)
        point_d2 = d2[np.arange(n), new_labels]
        # repair empty clusters with the point farthest from its own centroid
        while True:
            counts = np.bincount(new_labels, minlength=k)
            empty = np.flatnonzero(counts == 0)
            if empty.size == 0:
                break
            donor = int(np.argmax(point_d2))
            new_labels[donor] = empty[0]
            point_d2[donor] = 0.0
        for j in range(k):
            centers[j] = points[new_labels == j].mean(axis=0)
        wcss = float(((points - centers[new_labels]) ** 2).sum())
        trace.append(wcss)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return labels, trace[-1], np.asarray(trace)


def kmeans(
    w: np.ndarray, k: int, seed: int = 0, restarts: int = 10, max_iters: int = 100
) -> np.ndarray:
    """Cluster the columns of ``w`` into ``k`` groups.

    k-means++ seeding, Euclidean distance, best of ``restarts`` runs by
    within-cluster sum of squares with the restart index as tie-break.
    Nearest-centroid ties go to the lowest centroid index.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2:
        raise ValueError("coefficient matrix must be 2-dimensional")
    if not np.isfinite(w).all():
        raise ValueError("coefficient matrix contains non-finite values")
    points = np.ascontiguousarray(w.T)
    n = points.shape[0]
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of documents {n}")
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    best_labels = None
    best_wcss = np.inf
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        labels, wcss, _ = _lloyd(points, k, rng, max_iters)
        if wcss < best_wcss:
            best_wcss = wcss
            best_labels = labels
    return best_labels


def hungarian_match(confusion: np.ndarray) -> np.ndarray:
    """Cluster-to-topic permutation maximizing the total matched count."""
    confusion = np.asarray(confusion)
    if confusion.ndim != 2 or confusion.shape[0] != confusion.shape[1]:
        raise ValueError(f"confusion matrix must be square, got shape {confusion.shape}")
    if confusion.size and confusion.min() < 0:
        raise ValueError("confusion matrix must be nonnegative")
    _, cols = linear_sum_assignment(confusion, maximize=True)
    return cols


def confusion_matrix(assignment: LabelAssignment) -> np.ndarray:
    """K x K counts: entry (i, j) is how often cluster i met topic j."""
    k = assignment.n_classes
    flat = assignment.predicted * k + assignment.truth
    return np.bincount(flat, minlength=k * k).reshape(k, k)


def evaluate(assignment: LabelAssignment) -> EvalReport:
    """Align clusters with topics and report the matched fraction."""
    confusion = confusion_matrix(assignment)
    mapping = hungarian_match(confusion)
    matched = int(confusion[np.arange(confusion.shape[0]), mapping].sum())
    return EvalReport(
        accuracy=matched / len(assignment), mapping=mapping, confusion=confusion
    )


def accuracy(assignment: LabelAssignment) -> float:
    """Best-matched clustering accuracy in [0, 1]."""
    return evaluate(assignment).accuracy
