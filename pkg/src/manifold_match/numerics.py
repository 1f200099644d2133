"""Deterministic spectral primitives.

Symmetric eigendecomposition and the symmetric-definite generalized problem
``A v = lambda (B + ridge*I) v``, both with a fixed eigenvalue ordering and a
sign convention so that downstream embeddings are reproducible run to run on
one platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ConditioningError, ValidationError

__all__ = ["SpectralResult", "eig_sym", "eig_sym_generalized"]

# Fallback ridge scale used when Cholesky fails on a nominally PSD matrix.
_FALLBACK_RIDGE = 1e-10


@dataclass(frozen=True)
class SpectralResult:
    """Eigenvalues sorted descending with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_symmetric(a, name, rtol=1e-10):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} contains non-finite entries")
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.T) > rtol * max(scale, 1.0):
        raise ValidationError(f"{name} is not symmetric within relative {rtol:g}")
    return 0.5 * (a + a.T)


def _fix_signs(vectors):
    # Make the largest-magnitude entry of each column positive. argmax picks
    # the first maximum, so the choice is deterministic even under exact ties.
    if vectors.shape[1] == 0:
        return vectors
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eig_sym(a) -> SpectralResult:
    """Full decomposition of a symmetric matrix.

    Parameters
    ----------
    a : (n, n) array_like
        Symmetric within relative 1e-10.

    Returns
    -------
    SpectralResult
        Eigenvalues descending; orthonormal eigenvector columns with each
        column's largest-magnitude entry positive.
    """
    s = _as_symmetric(a, "A")
    values, vectors = np.linalg.eigh(s)
    order = np.argsort(-values, kind="stable")
    return SpectralResult(values[order], _fix_signs(vectors[:, order]))


def eig_sym_generalized(a, b, ridge=0.0) -> SpectralResult:
    """Solve ``A v = lambda (B + ridge*I) v`` with symmetric A and PD B.

    B is whitened by Cholesky and the problem reduced to a symmetric
    eigendecomposition, which keeps the returned eigenvectors exactly
    ``(B + ridge*I)``-orthonormal. If the first Cholesky fails, a fallback
    ridge of ``1e-10 * trace(B)/n`` is added once; a second failure raises
    :class:`ConditioningError`.

    Parameters
    ----------
    a, b : (n, n) array_like
        Symmetric matrices; ``b + ridge*I`` must be positive-definite.
    ridge : float, optional
        Nonnegative diagonal loading added to ``b``.
    """
    a_sym = _as_symmetric(a, "A")
    b_sym = _as_symmetric(b, "B")
    if a_sym.shape != b_sym.shape:
        raise ValidationError(
            f"A and B must have equal shapes, got {a_sym.shape} and {b_sym.shape}"
        )
    if ridge < 0:
        raise ValidationError(f"ridge must be nonnegative, got {ridge}")

    n = a_sym.shape[0]
    eye = np.eye(n)
    b_ridged = b_sym + ridge * eye
    try:
        lower = np.linalg.cholesky(b_ridged)
    except np.linalg.LinAlgError:
        # MDS-derived Gram blocks can be numerically singular; bump once.
        bump = _FALLBACK_RIDGE * np.trace(b_sym) / n
        b_ridged = b_ridged + bump * eye
        try:
            lower = np.linalg.cholesky(b_ridged)
        except np.linalg.LinAlgError:
            pivot = float(np.linalg.eigvalsh(b_ridged).min())
            raise ConditioningError(
                "B + ridge*I is not positive-definite "
                f"(smallest pivot {pivot:.3e})"
            ) from None

    half = solve_triangular(lower, a_sym, lower=True)
    whitened = solve_triangular(lower, half.T, lower=True)
    whitened = 0.5 * (whitened + whitened.T)
    values, vectors = np.linalg.eigh(whitened)
    order = np.argsort(-values, kind="stable")
    vectors = solve_triangular(lower.T, vectors[:, order], lower=False)
    return SpectralResult(values[order], _fix_signs(vectors))
