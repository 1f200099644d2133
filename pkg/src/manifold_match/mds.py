"""Classical (Torgerson) multidimensional scaling.

Embeds a dissimilarity matrix into Euclidean coordinates by spectrally
factoring the double-centered squared-dissimilarity matrix, keeps only the
strictly positive part of the spectrum, and extends to new points by Gower
interpolation using the stored centering statistics.

Embeddings are plain ``(n, p)`` float arrays, rows = objects.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dissimilarity import DissimilarityMatrix
from .errors import ValidationError
from .numerics import eig_sym

__all__ = ["MdsModel", "mds_fit", "mds_out_of_sample", "fidelity_error", "scree"]

# Eigenvalues below this fraction of the leading one count as zero, so that
# rank-deficient configurations report an honest effective dimension.
_POSITIVE_RTOL = 1e-10


def _dissim_values(delta, name="delta"):
    if isinstance(delta, DissimilarityMatrix):
        return delta.values
    arr = np.asarray(delta, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class MdsModel:
    """A fitted classical-scaling configuration.

    ``embedding`` holds the in-sample coordinates (columns centered),
    ``eigenvalues`` the retained positive spectrum, and ``row_means`` /
    ``grand_mean`` the centering statistics of the squared dissimilarities
    needed to embed new points. ``requested_dim`` is the dimension asked
    for; the effective dimension may be smaller when the spectrum has fewer
    positive eigenvalues.
    """

    embedding: np.ndarray
    eigenvalues: np.ndarray
    row_means: np.ndarray
    grand_mean: float
    requested_dim: int

    @property
    def n(self) -> int:
        return self.embedding.shape[0]

    @property
    def effective_dim(self) -> int:
        return self.embedding.shape[1]


def mds_fit(delta, p) -> MdsModel:
    """Embed a dissimilarity matrix into at most ``p`` Euclidean dimensions.

    The squared dissimilarities are double-centered into a Gram matrix
    whose top eigenpairs give coordinates ``V_p sqrt(L_p)``. Negative
    eigenvalues (non-Euclidean input) are dropped, never clamped, so the
    Gram identity on the retained eigenspace holds exactly.
    """
    d = _dissim_values(delta)
    n = d.shape[0]
    if not 1 <= p <= n - 1:
        raise ValidationError(f"target dimension must satisfy 1 <= p <= n-1, got p={p}, n={n}")

    squared = d * d
    row_means = squared.mean(axis=1)
    grand_mean = float(squared.mean())
    gram = -0.5 * (squared - row_means[:, None] - row_means[None, :] + grand_mean)

    spectrum = eig_sym(gram)
    cutoff = max(float(spectrum.eigenvalues[0]), 0.0) * _POSITIVE_RTOL
    positive = int(np.sum(spectrum.eigenvalues > cutoff))
    keep = min(p, positive)
    values = spectrum.eigenvalues[:keep].copy()
    coords = spectrum.eigenvectors[:, :keep] * np.sqrt(values)
    return MdsModel(coords, values, row_means, grand_mean, p)


def mds_out_of_sample(model, delta_new):
    """Embed new points from their dissimilarities to the training objects.

    Gower interpolation: with ``s`` the squared new dissimilarities,

        b_i = -1/2 (s_i - row_mean_i - mean(s) + grand_mean)
        y   = L_p^{-1/2} V_p^T b

    which reproduces training rows exactly and recovers held-out points of
    Euclidean configurations. Accepts one dissimilarity vector of length n
    or a matrix of such rows; the output matches the input's ndim.
    """
    arr = np.asarray(delta_new, dtype=float)
    single = arr.ndim == 1
    rows = np.atleast_2d(arr)
    if rows.ndim != 2 or rows.shape[1] != model.n:
        raise ValidationError(
            f"expected dissimilarities to {model.n} training objects, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(rows)):
        raise ValidationError("new dissimilarities contain non-finite entries")
    if rows.size and rows.min() < 0:
        raise ValidationError("new dissimilarities must be nonnegative")

    squared = rows * rows
    b = -0.5 * (
        squared
        - model.row_means[None, :]
        - squared.mean(axis=1, keepdims=True)
        + model.grand_mean
    )
    # X = V sqrt(L), so L^{-1/2} V^T b = L^{-1} X^T b.
    coords = (b @ model.embedding) / model.eigenvalues
    return coords[0] if single else coords


def fidelity_error(embedding, delta) -> float:
    """Mean squared mismatch between embedded distances and dissimilarities.

    ``(1 / C(n,2)) * sum_{i<j} (|x_i - x_j| - delta_ij)^2`` — the
    within-domain distortion of an embedding.
    """
    x = np.asarray(embedding, dtype=float)
    if x.ndim != 2:
        raise ValidationError(f"embedding must be 2-D, got shape {x.shape}")
    d = _dissim_values(delta)
    n = d.shape[0]
    if x.shape[0] != n:
        raise ValidationError(
            f"embedding has {x.shape[0]} rows but dissimilarity matrix is {n}x{n}"
        )
    if n < 2:
        return 0.0
    diff = x[:, None, :] - x[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=-1))
    iu = np.triu_indices(n, k=1)
    gaps = dist[iu] - d[iu]
    return float(np.mean(gaps * gaps))


def scree(model) -> np.ndarray:
    """Square roots of the retained eigenvalues, descending (scree data)."""
    return np.sqrt(model.eigenvalues)
