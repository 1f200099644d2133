"""Dissimilarity constructions over one domain.

Two kinds are supported: hop-count graph geodesics with far pairs capped, and
cosine dissimilarity of feature rows. Frobenius prescaling rescales one matrix
onto another's norm so matrices of different kinds can be fused downstream.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .errors import FormatError, ValidationError

__all__ = [
    "DissimilarityMatrix",
    "KIND_GRAPH",
    "KIND_TEXT",
    "graph_geodesic",
    "cosine_dissimilarity",
    "frobenius_prescale",
    "load_dissimilarity_tsv",
    "save_dissimilarity_tsv",
]

KIND_GRAPH = "graph"
KIND_TEXT = "text"

_SYM_ATOL = 1e-12


@dataclass(frozen=True)
class DissimilarityMatrix:
    """Square symmetric nonnegative dissimilarities with a provenance tag.

    ``kind`` records how the entries were produced (``"graph"`` hop counts,
    ``"text"`` cosine, or a free-form tag for externally supplied matrices).
    Kind-specific ranges — integer hop counts bounded by ``cap``, cosine
    values in [0, 2] — are guaranteed by the constructing operations, not
    re-checked here, because :func:`frobenius_prescale` legitimately rescales
    entries out of those ranges while keeping the tag.
    """

    values: np.ndarray
    kind: str
    domain_name: str = ""
    object_index: tuple[str, ...] | None = None
    cap: int | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValidationError(f"dissimilarity matrix must be square, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("dissimilarity matrix contains non-finite entries")
        if v.size:
            if np.max(np.abs(v - v.T)) > _SYM_ATOL:
                raise ValidationError(
                    f"dissimilarity matrix is not symmetric within {_SYM_ATOL:g}"
                )
            if np.max(np.abs(np.diag(v))) > _SYM_ATOL:
                raise ValidationError("dissimilarity matrix has a nonzero diagonal")
            if v.min() < -_SYM_ATOL:
                raise ValidationError("dissimilarity matrix has negative entries")
        # Normalize to exact symmetry / zero diagonal / nonnegativity so
        # downstream spectral code never sees tolerance-level asymmetry.
        v = 0.5 * (v + v.T)
        np.fill_diagonal(v, 0.0)
        np.clip(v, 0.0, None, out=v)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.object_index is not None:
            index = tuple(self.object_index)
            if len(index) != v.shape[0]:
                raise ValidationError(
                    f"object index has {len(index)} ids for a "
                    f"{v.shape[0]}x{v.shape[0]} matrix"
                )
            object.__setattr__(self, "object_index", index)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def graph_geodesic(edges, n, cap=6, max_hops=4, domain_name="", object_index=None):
    """Hop-count dissimilarity on an unweighted undirected graph.

    Entry (i, j) is the BFS shortest-path length when it is at most
    ``max_hops``; longer or unreachable pairs get ``cap``. BFS runs once per
    source vertex; cheap and exact at the corpus sizes this targets.

    Parameters
    ----------
    edges : (E, 2) array_like of int
        Undirected edges over vertices 0..n-1 (duplicates and self-loops
        are tolerated).
    n : int
        Vertex count.
    cap : int, optional
        Value assigned to pairs farther than ``max_hops``; must exceed it.
    max_hops : int, optional
        Largest path length kept exact.
    """
    if n <= 0:
        raise ValidationError(f"vertex count must be positive, got {n}")
    if max_hops < 1 or cap <= max_hops:
        raise ValidationError(
            f"need cap > max_hops >= 1, got cap={cap}, max_hops={max_hops}"
        )
    e = np.asarray(edges, dtype=int)
    if e.size == 0:
        e = e.reshape(0, 2)
    if e.ndim != 2 or e.shape[1] != 2:
        raise ValidationError(f"edge list must have shape (E, 2), got {e.shape}")
    if e.size and (e.min() < 0 or e.max() >= n):
        raise ValidationError(
            f"edge endpoint out of range [0, {n}) in edge list"
        )

    adjacency = [[] for _ in range(n)]
    for i, j in e:
        adjacency[i].append(int(j))
        adjacency[j].append(int(i))

    out = np.full((n, n), float(cap))
    dist = np.empty(n, dtype=int)
    for source in range(n):
        dist.fill(-1)
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            du = dist[u]
            if du >= max_hops:
                continue  # anything further ends up capped anyway
            for w in adjacency[u]:
                if dist[w] < 0:
                    dist[w] = du + 1
                    queue.append(w)
        reached = dist >= 0
        out[source, reached] = dist[reached]
    np.fill_diagonal(out, 0.0)
    return DissimilarityMatrix(
        out, KIND_GRAPH, domain_name=domain_name, object_index=object_index, cap=cap
    )


def cosine_dissimilarity(features, domain_name="", object_index=None):
    """Cosine dissimilarity ``1 - <f_i, f_j> / (|f_i| |f_j|)`` of feature rows.

    Self-similarity is forced to one before the subtraction so the diagonal
    is exactly zero, and entries are clipped to the cosine range [0, 2].
    """
    f = np.asarray(features, dtype=float)
    if f.ndim != 2:
        raise ValidationError(f"feature matrix must be 2-D, got shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValidationError("feature matrix contains non-finite entries")
    norms = np.linalg.norm(f, axis=1)
    zero_rows = np.flatnonzero(norms == 0.0)
    if zero_rows.size:
        raise ValidationError(f"feature row {zero_rows[0]} has zero norm")
    unit = f / norms[:, None]
    similarity = unit @ unit.T
    np.fill_diagonal(similarity, 1.0)
    d = 1.0 - similarity
    np.clip(d, 0.0, 2.0, out=d)
    d = 0.5 * (d + d.T)
    return DissimilarityMatrix(
        d, KIND_TEXT, domain_name=domain_name, object_index=object_index
    )


def frobenius_prescale(target, reference):
    """Rescale ``target`` so its Frobenius norm matches ``reference``'s.

    Returns ``target * |reference|_F / |target|_F`` with kind and shape
    preserved. Needed before fusing matrices whose kinds live on different
    scales (cosine values vs hop counts).
    """
    t_norm = float(np.linalg.norm(target.values))
    if t_norm == 0.0:
        raise ValidationError("cannot prescale a matrix with zero Frobenius norm")
    r_norm = float(np.linalg.norm(reference.values))
    return replace(target, values=target.values * (r_norm / t_norm))


def save_dissimilarity_tsv(matrix, path):
    """Write the full square matrix as tab-separated reals (round-trip exact)."""
    values = matrix.values if isinstance(matrix, DissimilarityMatrix) else np.asarray(matrix)
    with open(path, "w", encoding="utf-8") as fh:
        for row in values:
            fh.write("\t".join(repr(float(x)) for x in row))
            fh.write("\n")


def load_dissimilarity_tsv(path, kind, domain_name="", object_index=None, cap=None):
    """Read a full square tab-separated matrix into a DissimilarityMatrix."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split("\t")])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise FormatError(f"{path}: empty dissimilarity file")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise FormatError(f"{path}: ragged rows (widths {sorted(widths)})")
    values = np.asarray(rows, dtype=float)
    if values.shape[0] != values.shape[1]:
        raise FormatError(
            f"{path}: expected a square matrix, got {values.shape[0]}x{values.shape[1]}"
        )
    return DissimilarityMatrix(
        values, kind, domain_name=domain_name, object_index=object_index, cap=cap
    )
