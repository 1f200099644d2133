"""k-nearest-neighbor classification in the shared space.

Supports the cross-view protocol: the classifier trains on one view's
projections and is evaluated leave-one-out on another view's projections of
the same objects, plus the averaged-view training variant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntegrityError, ValidationError

__all__ = [
    "LabeledEmbedding",
    "knn_predict",
    "loo_cross_view_accuracy",
    "average_views",
]


@dataclass(frozen=True)
class LabeledEmbedding:
    """Shared-space coordinates with class labels and a provenance tag."""

    points: np.ndarray
    labels: np.ndarray
    view_tag: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValidationError(f"points must be 2-D, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("points contain non-finite coordinates")
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.shape[0] != pts.shape[0]:
            raise IntegrityError(
                f"{labels.shape[0] if labels.ndim == 1 else labels.shape} labels "
                f"for {pts.shape[0]} points"
            )
        if not np.issubdtype(labels.dtype, np.integer):
            raise ValidationError("labels must be integer class ids")
        if labels.size and labels.min() < 0:
            raise ValidationError("labels must be nonnegative")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labels.astype(np.int64))

    def __len__(self) -> int:
        return self.points.shape[0]


def _vote(labels, distances):
    # Majority vote; ties broken by smallest mean distance among the tied
    # classes, then by smallest class id. Depends only on label statistics,
    # so it is invariant to training-row order.
    classes, counts = np.unique(labels, return_counts=True)
    top = counts.max()
    tied = classes[counts == top]
    if tied.size == 1:
        return int(tied[0])
    best = None
    for cls in tied:
        mean_dist = float(distances[labels == cls].mean())
        key = (mean_dist, int(cls))
        if best is None or key < best:
            best = key
    return best[1]


def knn_predict(train, query, kappa) -> int:
    """Majority label among the ``kappa`` nearest training rows.

    Distance ties at the kappa-th neighbor are resolved toward the smallest
    training index (stable sort), keeping exactly kappa votes and a
    deterministic answer.
    """
    if len(train) == 0:
        raise ValidationError("training set is empty")
    if not 1 <= kappa <= len(train):
        raise ValidationError(
            f"kappa must satisfy 1 <= kappa <= {len(train)}, got {kappa}"
        )
    q = np.asarray(query, dtype=float)
    if q.shape != (train.points.shape[1],):
        raise ValidationError(
            f"query has shape {q.shape}, expected ({train.points.shape[1]},)"
        )
    distances = np.linalg.norm(train.points - q, axis=1)
    nearest = np.argsort(distances, kind="stable")[:kappa]
    return _vote(train.labels[nearest], distances[nearest])


def _check_matched(a, b):
    if a.points.shape != b.points.shape:
        raise IntegrityError(
            f"views have mismatched shapes {a.points.shape} and {b.points.shape}"
        )
    if not np.array_equal(a.labels, b.labels):
        raise IntegrityError("views disagree on labels; rows must be matched objects")


def loo_cross_view_accuracy(train_view, test_view, kappa) -> float:
    """Leave-one-out accuracy training on one view, testing on another.

    For each object i the classifier sees every training-view row except i
    (the held-out object is removed from the *training* side) and predicts
    test-view row i; accuracy is the fraction predicted correctly.
    """
    _check_matched(train_view, test_view)
    m = len(train_view)
    if not 1 <= kappa <= m - 1:
        raise ValidationError(
            f"kappa must satisfy 1 <= kappa <= m-1 = {m - 1}, got {kappa}"
        )
    labels = train_view.labels
    correct = 0
    for i in range(m):
        distances = np.linalg.norm(train_view.points - test_view.points[i], axis=1)
        distances[i] = np.inf  # drop object i from the training side
        nearest = np.argsort(distances, kind="stable")[:kappa]
        if _vote(labels[nearest], distances[nearest]) == labels[i]:
            correct += 1
    return correct / m


def average_views(a, b, view_tag=None) -> LabeledEmbedding:
    """Pointwise mean of two matched views (the fused training variant)."""
    _check_matched(a, b)
    tag = view_tag if view_tag is not None else a.view_tag + b.view_tag
    return LabeledEmbedding(0.5 * (a.points + b.points), a.labels, tag)
