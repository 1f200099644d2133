"""Linear alignment of per-domain embeddings into a shared space.

CCA for two views and its many-view generalization are both solved as one
symmetric-definite generalized eigenproblem on the block cross-product
matrices: ``R u = lambda D u`` with R holding the between-view blocks
``X_g^T X_h`` (zero diagonal), D the block diagonal of ``X_g^T X_g`` plus a
small ridge. Per-dimension maps are normalized so the averaged projected
energy ``(1/K) sum_g |X_g u_g|^2`` is one, and the reported correlation of
dimension l is the averaged pairwise cross-correlation of the projected
views, which is exactly one when all views coincide.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConditioningError, ValidationError
from .numerics import eig_sym_generalized

__all__ = [
    "AlignmentMaps",
    "cca_fit",
    "gcca_fit",
    "project",
    "commensurability_error",
    "save_alignment",
    "load_alignment",
]

# Ridge is purely numerical; embeddings can be rank-deficient after class
# subsampling. Scaled by the mean diagonal of the block-diagonal matrix.
_DEFAULT_RIDGE_SCALE = 1e-8

_DESCENDING_SLACK = 1e-9


@dataclass(frozen=True)
class AlignmentMaps:
    """Per-view projection matrices into the shared space.

    ``projections[k]`` maps view k's coordinates (p_k columns) onto the d
    shared dimensions; ``correlations`` holds the per-dimension alignment
    correlations, descending in [-1, 1].
    """

    projections: tuple[np.ndarray, ...]
    correlations: np.ndarray
    method: str
    ridge: float

    def __post_init__(self):
        rho = np.asarray(self.correlations, dtype=float)
        if np.any(np.abs(rho) > 1.0 + _DESCENDING_SLACK):
            raise ValidationError("correlations must lie in [-1, 1]")
        if np.any(np.diff(rho) > _DESCENDING_SLACK):
            raise ValidationError("correlations must be sorted descending")

    @property
    def K(self) -> int:
        return len(self.projections)

    @property
    def d(self) -> int:
        return self.projections[0].shape[1]


def _centered_views(views):
    centered = []
    n_rows = None
    for k, view in enumerate(views):
        x = np.asarray(view, dtype=float)
        if x.ndim != 2:
            raise ValidationError(f"view {k} must be 2-D, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValidationError(f"view {k} contains non-finite entries")
        if n_rows is None:
            n_rows = x.shape[0]
        elif x.shape[0] != n_rows:
            raise ValidationError(
                f"view {k} has {x.shape[0]} rows, expected {n_rows}"
            )
        centered.append(x - x.mean(axis=0))
    return centered, n_rows


def _fit(views, d, ridge, method):
    xs, n = _centered_views(views)
    K = len(xs)
    widths = [x.shape[1] for x in xs]
    if d < 1:
        raise ValidationError(f"shared dimension must be positive, got {d}")
    if d > min(widths):
        raise ValidationError(
            f"shared dimension {d} exceeds the narrowest view width {min(widths)}"
        )
    if d > n - 1:
        raise ValidationError(f"shared dimension {d} needs at least {d + 1} rows, got {n}")

    total = sum(widths)
    offsets = np.cumsum([0] + widths)
    cross = np.zeros((total, total))
    diag = np.zeros((total, total))
    for g in range(K):
        sg = slice(offsets[g], offsets[g + 1])
        diag[sg, sg] = xs[g].T @ xs[g]
        for h in range(g + 1, K):
            sh = slice(offsets[h], offsets[h + 1])
            block = xs[g].T @ xs[h]
            cross[sg, sh] = block
            cross[sh, sg] = block.T
    if ridge is None:
        ridge = _DEFAULT_RIDGE_SCALE * float(np.trace(diag)) / total

    solution = eig_sym_generalized(cross, diag, ridge=ridge)
    stacked = solution.eigenvectors[:, :d]

    maps = [stacked[offsets[g]:offsets[g + 1], :] for g in range(K)]
    projected = [xs[g] @ maps[g] for g in range(K)]

    # Normalize each dimension to unit averaged projected energy:
    # (1/K) sum_g |X_g u_g^l|^2 = 1.
    energy = np.zeros(d)
    for z in projected:
        energy += (z * z).sum(axis=0)
    energy /= K
    if np.any(energy <= 0):
        bad = int(np.flatnonzero(energy <= 0)[0])
        raise ConditioningError(
            f"alignment dimension {bad} has zero projected energy; "
            "reduce the shared dimension or increase the ridge"
        )
    scale = 1.0 / np.sqrt(energy)
    maps = [u * scale for u in maps]
    projected = [z * scale for z in projected]

    if method == "cca":
        z1, z2 = projected
        norms1 = np.linalg.norm(z1, axis=0)
        norms2 = np.linalg.norm(z2, axis=0)
        rho = (z1 * z2).sum(axis=0) / (norms1 * norms2)
    else:
        # Averaged pairwise cross-correlation over ordered view pairs g != h.
        total_z = np.zeros_like(projected[0])
        sum_sq = np.zeros(d)
        for z in projected:
            total_z += z
            sum_sq += (z * z).sum(axis=0)
        rho = ((total_z * total_z).sum(axis=0) - sum_sq) / (K * (K - 1))

    # Stable descending sort; eigenvalue order already matches up to
    # rounding, so this only relabels dimensions deterministically.
    order = np.argsort(-rho, kind="stable")
    rho = rho[order]
    maps = tuple(np.ascontiguousarray(u[:, order]) for u in maps)
    return AlignmentMaps(maps, rho, method, float(ridge))


def cca_fit(x1, x2, d, ridge=None) -> AlignmentMaps:
    """Two-view canonical correlation on centered embeddings.

    Maximizes the per-dimension correlation of the projected views under
    unit projected energy, successive dimensions decorrelated. ``ridge``
    defaults to a small multiple of the mean auto-covariance diagonal;
    pass 0 to disable.
    """
    return _fit([x1, x2], d, ridge, "cca")


def gcca_fit(views, d, ridge=None) -> AlignmentMaps:
    """Many-view generalization of CCA.

    Maximizes the averaged pairwise cross-correlation over all ordered view
    pairs under unit averaged projected energy; with two views the
    correlation spectrum coincides with :func:`cca_fit`'s.
    """
    if len(views) < 2:
        raise ValidationError(f"need at least 2 views, got {len(views)}")
    return _fit(list(views), d, ridge, "gcca")


def project(maps, view_index, points):
    """Project view ``view_index``'s coordinates into the shared space."""
    if not 0 <= view_index < maps.K:
        raise ValidationError(f"view index {view_index} out of range [0, {maps.K})")
    x = np.asarray(points, dtype=float)
    u = maps.projections[view_index]
    if x.ndim != 2 or x.shape[1] != u.shape[0]:
        raise ValidationError(
            f"points have shape {x.shape}, expected (*, {u.shape[0]}) for view {view_index}"
        )
    return x @ u


def commensurability_error(proj_a, proj_b) -> float:
    """Mean squared shared-space distance between matched rows.

    ``(1/n) sum_i |a_i - b_i|^2`` — how far apart one object's two
    projections land.
    """
    a = np.asarray(proj_a, dtype=float)
    b = np.asarray(proj_b, dtype=float)
    if a.shape != b.shape or a.ndim != 2:
        raise ValidationError(
            f"projections must share one 2-D shape, got {a.shape} and {b.shape}"
        )
    diff = a - b
    return float((diff * diff).sum() / a.shape[0])


def save_alignment(maps, out_dir):
    """Write U_<k>.tsv per view, correlations.tsv, and meta.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for k, u in enumerate(maps.projections, start=1):
        with open(out / f"U_{k}.tsv", "w", encoding="utf-8") as fh:
            for row in u:
                fh.write("\t".join(repr(float(x)) for x in row))
                fh.write("\n")
    with open(out / "correlations.tsv", "w", encoding="utf-8") as fh:
        for rho in maps.correlations:
            fh.write(repr(float(rho)))
            fh.write("\n")
    meta = {"method": maps.method, "d": maps.d, "K": maps.K, "ridge": maps.ridge}
    with open(out / "meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_alignment(in_dir) -> AlignmentMaps:
    """Inverse of :func:`save_alignment`."""
    src = Path(in_dir)
    with open(src / "meta.json", "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    projections = []
    for k in range(1, int(meta["K"]) + 1):
        rows = []
        with open(src / f"U_{k}.tsv", "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    rows.append([float(tok) for tok in line.split("\t")])
        projections.append(np.asarray(rows, dtype=float))
    with open(src / "correlations.tsv", "r", encoding="utf-8") as fh:
        correlations = np.asarray([float(line.strip()) for line in fh if line.strip()])
    return AlignmentMaps(
        tuple(projections), correlations, str(meta["method"]), float(meta["ridge"])
    )
