"""Corpus loading, validation, synthesis, and the class-based role split.

A corpus on disk is a directory: ``manifest.json`` with object ids, labels,
roles, and per-domain file references; per-domain ``features.tsv`` (one row
of tab-separated reals per object), ``edges.tsv`` (two object-id columns per
line, undirected), and optional precomputed ``dissim_<kind>.tsv`` square
matrices. Plain text throughout so corpora are diff-able and language
neutral.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .dissimilarity import (
    DissimilarityMatrix,
    load_dissimilarity_tsv,
    save_dissimilarity_tsv,
)
from .errors import FormatError, IntegrityError, ValidationError

__all__ = [
    "ROLE_RELATION",
    "ROLE_CLASSIFIER",
    "DomainData",
    "LabeledCorpus",
    "ClassSplitSpec",
    "load_corpus",
    "save_corpus",
    "apply_class_split",
    "synthesize_corpus",
]

log = logging.getLogger(__name__)

ROLE_RELATION = "relation_learning"
ROLE_CLASSIFIER = "classifier"
_ROLES = (ROLE_RELATION, ROLE_CLASSIFIER)

_NAME_RE = re.compile(r"^[A-Za-z0-9_.-]+$")


@dataclass(frozen=True)
class DomainData:
    """One domain's measurements: feature rows, graph edges, or both.

    A domain missing feature vectors can still serve graph dissimilarities
    and vice versa; ``supported_kinds`` records what it can provide.
    """

    name: str
    features: np.ndarray | None = None
    edges: np.ndarray | None = None
    dissimilarities: dict[str, DissimilarityMatrix] = field(default_factory=dict)

    def supported_kinds(self) -> frozenset[str]:
        kinds = set(self.dissimilarities)
        if self.edges is not None:
            kinds.add("graph")
        if self.features is not None:
            kinds.add("text")
        return frozenset(kinds)


@dataclass(frozen=True)
class LabeledCorpus:
    """Matched multi-domain objects with labels and role flags.

    Every object appears in every domain; roles partition objects into the
    relation-learning pool (used to fit embeddings and alignment) and the
    classifier pool (used to train/test the downstream classifier).
    """

    object_ids: tuple[str, ...]
    labels: np.ndarray
    roles: np.ndarray
    domains: tuple[DomainData, ...]

    def __post_init__(self):
        ids = tuple(str(i) for i in self.object_ids)
        n = len(ids)
        if n == 0:
            raise IntegrityError("corpus has zero objects")
        if len(set(ids)) != n:
            raise IntegrityError("object ids are not unique")
        object.__setattr__(self, "object_ids", ids)

        labels = np.asarray(self.labels)
        if labels.shape != (n,):
            raise IntegrityError(f"{labels.shape} labels for {n} objects")
        if not np.issubdtype(labels.dtype, np.integer):
            raise ValidationError("labels must be integer class ids")
        if labels.min() < 0:
            raise ValidationError("labels must be nonnegative")
        object.__setattr__(self, "labels", labels.astype(np.int64))

        roles = np.asarray(self.roles)
        if roles.shape != (n,):
            raise IntegrityError(f"{roles.shape} roles for {n} objects")
        bad = set(roles.tolist()) - set(_ROLES)
        if bad:
            raise ValidationError(f"unknown roles {sorted(bad)}")
        object.__setattr__(self, "roles", roles.astype(str))

        if not self.domains:
            raise IntegrityError("corpus has no domains")
        seen = set()
        for domain in self.domains:
            if domain.name in seen:
                raise IntegrityError(f"duplicate domain name {domain.name!r}")
            seen.add(domain.name)
            if domain.features is not None:
                f = domain.features
                if f.ndim != 2 or f.shape[0] != n:
                    raise IntegrityError(
                        f"domain {domain.name!r} has {f.shape[0] if f.ndim == 2 else f.shape} "
                        f"feature rows for {n} objects"
                    )
                if not np.all(np.isfinite(f)):
                    raise ValidationError(
                        f"domain {domain.name!r} features contain non-finite entries"
                    )
            if domain.edges is not None:
                e = domain.edges
                if e.size and (e.min() < 0 or e.max() >= n):
                    raise IntegrityError(
                        f"domain {domain.name!r} has edge endpoints outside [0, {n})"
                    )
            for kind, dm in domain.dissimilarities.items():
                if dm.n != n:
                    raise IntegrityError(
                        f"domain {domain.name!r} {kind} dissimilarity is {dm.n}x{dm.n} "
                        f"for {n} objects"
                    )

    @property
    def n_total(self) -> int:
        return len(self.object_ids)

    @property
    def n_relation(self) -> int:
        return int(np.sum(self.roles == ROLE_RELATION))

    @property
    def n_classifier(self) -> int:
        return int(np.sum(self.roles == ROLE_CLASSIFIER))

    def relation_indices(self) -> np.ndarray:
        return np.flatnonzero(self.roles == ROLE_RELATION)

    def classifier_indices(self) -> np.ndarray:
        return np.flatnonzero(self.roles == ROLE_CLASSIFIER)

    def domain(self, name) -> DomainData:
        for d in self.domains:
            if d.name == name:
                return d
        raise ValidationError(f"no domain named {name!r}")

    def class_sizes(self) -> dict[int, int]:
        values, counts = np.unique(self.labels, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}


@dataclass(frozen=True)
class ClassSplitSpec:
    """Which class ids feed relation learning vs the classifier."""

    relation_classes: frozenset[int]
    classifier_classes: frozenset[int]

    def __post_init__(self):
        rel = frozenset(int(c) for c in self.relation_classes)
        clf = frozenset(int(c) for c in self.classifier_classes)
        if rel & clf:
            raise ValidationError(
                f"relation and classifier classes overlap: {sorted(rel & clf)}"
            )
        if not rel or not clf:
            raise ValidationError("both class sets must be non-empty")
        object.__setattr__(self, "relation_classes", rel)
        object.__setattr__(self, "classifier_classes", clf)


def apply_class_split(corpus, split) -> LabeledCorpus:
    """Reassign roles by class membership, dropping out-of-split objects.

    Objects labeled with a relation class become relation-learning data,
    classifier-class objects become classifier data, and objects in neither
    set are dropped (count logged). Object order is preserved within the
    survivors; edges and precomputed dissimilarities are re-indexed.
    """
    present = set(int(v) for v in np.unique(corpus.labels))
    unknown = sorted((split.relation_classes | split.classifier_classes) - present)
    if unknown:
        raise ValidationError(f"split names classes absent from the corpus: {unknown}")

    rel_mask = np.isin(corpus.labels, sorted(split.relation_classes))
    clf_mask = np.isin(corpus.labels, sorted(split.classifier_classes))
    keep = rel_mask | clf_mask
    dropped = int(np.sum(~keep))
    if dropped:
        log.info("apply_class_split dropped %d objects outside the split classes", dropped)

    old_indices = np.flatnonzero(keep)
    remap = -np.ones(corpus.n_total, dtype=int)
    remap[old_indices] = np.arange(old_indices.size)

    ids = tuple(corpus.object_ids[i] for i in old_indices)
    labels = corpus.labels[old_indices]
    roles = np.where(rel_mask[old_indices], ROLE_RELATION, ROLE_CLASSIFIER)

    domains = []
    for domain in corpus.domains:
        features = domain.features[old_indices] if domain.features is not None else None
        edges = None
        if domain.edges is not None:
            e = domain.edges
            if e.size:
                both = keep[e[:, 0]] & keep[e[:, 1]]
                edges = remap[e[both]]
            else:
                edges = e.copy()
        dissims = {
            kind: replace(
                dm,
                values=dm.values[np.ix_(old_indices, old_indices)],
                object_index=ids if dm.object_index is not None else None,
            )
            for kind, dm in domain.dissimilarities.items()
        }
        domains.append(
            DomainData(domain.name, features=features, edges=edges, dissimilarities=dissims)
        )
    return LabeledCorpus(ids, labels, roles, tuple(domains))


# ---------------------------------------------------------------------------
# Disk format
# ---------------------------------------------------------------------------


def _write_features_tsv(features, path):
    with open(path, "w", encoding="utf-8") as fh:
        for row in features:
            fh.write("\t".join(repr(float(x)) for x in row))
            fh.write("\n")


def _read_features_tsv(path):
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
        return np.zeros((0, 0))
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise FormatError(f"{path}: ragged feature rows (widths {sorted(widths)})")
    return np.asarray(rows, dtype=float)


def _write_edges_tsv(edges, object_ids, path):
    with open(path, "w", encoding="utf-8") as fh:
        for i, j in edges:
            fh.write(f"{object_ids[i]}\t{object_ids[j]}\n")


def _read_edges_tsv(path, id_to_index):
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(
                    f"{path}:{lineno}: expected two object-id columns, got {len(parts)}"
                )
            try:
                pairs.append((id_to_index[parts[0]], id_to_index[parts[1]]))
            except KeyError as exc:
                raise IntegrityError(f"{path}:{lineno}: unknown object id {exc}") from None
    return np.asarray(pairs, dtype=int).reshape(-1, 2)


def save_corpus(corpus, path):
    """Serialize a corpus to a directory (manifest plus per-domain files)."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    domain_entries = []
    for domain in corpus.domains:
        if not _NAME_RE.match(domain.name):
            raise ValidationError(
                f"domain name {domain.name!r} is not filesystem-safe"
            )
        ddir = root / domain.name
        ddir.mkdir(exist_ok=True)
        entry = {"name": domain.name, "features": None, "edges": None, "dissimilarities": {}}
        if domain.features is not None:
            rel = f"{domain.name}/features.tsv"
            _write_features_tsv(domain.features, root / rel)
            entry["features"] = rel
        if domain.edges is not None:
            rel = f"{domain.name}/edges.tsv"
            _write_edges_tsv(domain.edges, corpus.object_ids, root / rel)
            entry["edges"] = rel
        for kind, dm in sorted(domain.dissimilarities.items()):
            rel = f"{domain.name}/dissim_{kind}.tsv"
            save_dissimilarity_tsv(dm, root / rel)
            entry["dissimilarities"][kind] = {"file": rel, "cap": dm.cap}
        domain_entries.append(entry)
    manifest = {
        "objects": {
            "ids": list(corpus.object_ids),
            "labels": [int(x) for x in corpus.labels],
            "roles": [str(r) for r in corpus.roles],
        },
        "domains": domain_entries,
    }
    with open(root / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_corpus(path, format="dir") -> LabeledCorpus:
    """Load and validate a corpus directory.

    ``format`` names the on-disk layout; only ``"dir"`` (the manifest
    directory described in the module docstring) is defined.
    """
    if format != "dir":
        raise ValidationError(f"unknown corpus format {format!r}")
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise FormatError(f"{manifest_path}: manifest not found")
    try:
        with open(manifest_path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{manifest_path}: {exc}") from None

    try:
        objects = manifest["objects"]
        ids = [str(i) for i in objects["ids"]]
        labels = objects["labels"]
        domain_entries = manifest["domains"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"{manifest_path}: missing or malformed field {exc}") from None
    if len(ids) == 0:
        raise IntegrityError(f"{manifest_path}: corpus has zero objects")
    if len(labels) != len(ids):
        raise IntegrityError(
            f"{manifest_path}: {len(labels)} labels for {len(ids)} object ids"
        )
    roles = objects.get("roles")
    if roles is None:
        roles = [ROLE_RELATION] * len(ids)
    elif len(roles) != len(ids):
        raise IntegrityError(
            f"{manifest_path}: {len(roles)} roles for {len(ids)} object ids"
        )
    id_to_index = {oid: k for k, oid in enumerate(ids)}

    domains = []
    for entry in domain_entries:
        try:
            name = str(entry["name"])
        except (KeyError, TypeError) as exc:
            raise FormatError(f"{manifest_path}: malformed domain entry: {exc}") from None
        features = None
        if entry.get("features"):
            features = _read_features_tsv(root / entry["features"])
        edges = None
        if entry.get("edges"):
            edges = _read_edges_tsv(root / entry["edges"], id_to_index)
        dissims = {}
        for kind, ref in (entry.get("dissimilarities") or {}).items():
            if isinstance(ref, str):
                file_rel, cap = ref, None
            else:
                file_rel, cap = ref["file"], ref.get("cap")
            dissims[kind] = load_dissimilarity_tsv(
                root / file_rel,
                kind,
                domain_name=name,
                object_index=tuple(ids),
                cap=cap,
            )
        domains.append(DomainData(name, features=features, edges=edges, dissimilarities=dissims))

    return LabeledCorpus(
        tuple(ids), np.asarray(labels), np.asarray(roles), tuple(domains)
    )


# ---------------------------------------------------------------------------
# Synthesis
# ---------------------------------------------------------------------------

_LATENT_DIM = 3
_RING_RADIUS = 4.0
_ARC_FILL = 0.7
_BOX = 0.8
_TARGET_DEGREE = 8


def _threshold_edges(points):
    """Geometric graph: distance threshold tuned to the target mean degree.

    Disconnected components are bridged through their nearest cross pairs so
    geodesics stay finite without injecting long random shortcut edges that
    would corrupt the hop metric.
    """
    n = points.shape[0]
    iu = np.triu_indices(n, k=1)
    dist = np.sqrt(((points[iu[0]] - points[iu[1]]) ** 2).sum(axis=1))
    k = min(dist.size, max(1, (_TARGET_DEGREE * n) // 2))
    threshold = np.partition(dist, k - 1)[k - 1]
    mask = dist <= threshold
    pairs = {(int(a), int(b)) for a, b in zip(iu[0][mask], iu[1][mask])}

    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        parent[find(a)] = find(b)
    square = np.zeros((n, n))
    square[iu] = dist
    square += square.T
    while True:
        components = {}
        for v in range(n):
            components.setdefault(find(v), []).append(v)
        groups = list(components.values())
        if len(groups) == 1:
            break
        base = groups[0]
        rest = [v for group in groups[1:] for v in group]
        sub = square[np.ix_(base, rest)]
        bi, rj = np.unravel_index(np.argmin(sub), sub.shape)
        a, b = base[bi], rest[rj]
        pairs.add((min(a, b), max(a, b)))
        parent[find(a)] = find(b)
    return np.asarray(sorted(pairs), dtype=int)


def synthesize_corpus(seed, n_objects, k_domains, n_classes, noise) -> LabeledCorpus:
    """Deterministic matched corpus for pipeline tests and benchmarks.

    Classes occupy arcs of a latent ring (closed, so every class interpolates
    between its neighbors and hop distances stay informative everywhere).
    Each domain sees the latent points through its own scaled orthogonal map,
    so at noise zero all domains share one geometry exactly; ``noise`` adds
    Gaussian perturbation scaled by the domain's signal spread. Each domain
    gets both feature rows and a geometric edge list, with independent noise
    draws for the two, mirroring content vs link structure as separate
    measurements. All objects start in the relation-learning role; use
    :func:`apply_class_split` to carve out classifier classes.
    """
    if n_classes < 2:
        raise ValidationError(f"need at least 2 classes, got {n_classes}")
    if n_objects < n_classes:
        raise ValidationError(
            f"need n_objects >= n_classes, got {n_objects} < {n_classes}"
        )
    if k_domains < 2:
        raise ValidationError(f"need at least 2 domains, got {k_domains}")
    if noise < 0:
        raise ValidationError(f"noise must be nonnegative, got {noise}")

    rng = np.random.default_rng(seed)
    labels = np.arange(n_objects) % n_classes
    rng.shuffle(labels)
    slot = 2.0 * np.pi / n_classes
    angle = labels * slot + rng.uniform(
        -0.5 * _ARC_FILL * slot, 0.5 * _ARC_FILL * slot, size=n_objects
    )
    latent = rng.uniform(-_BOX, _BOX, size=(n_objects, _LATENT_DIM))
    latent[:, 0] += _RING_RADIUS * np.cos(angle)
    latent[:, 1] += _RING_RADIUS * np.sin(angle)

    domains = []
    for k in range(k_domains):
        width = _LATENT_DIM + 2 + k
        gauss = rng.normal(size=(width, _LATENT_DIM))
        basis, _ = np.linalg.qr(gauss)
        signal = (1.0 + 0.3 * k) * (latent @ basis.T)
        spread = signal.std()
        features = signal + noise * spread * rng.normal(size=signal.shape)
        link_copy = signal + noise * spread * rng.normal(size=signal.shape)
        edges = _threshold_edges(link_copy)
        domains.append(DomainData(f"domain{k}", features=features, edges=edges))

    ids = tuple(f"obj{i:04d}" for i in range(n_objects))
    roles = np.full(n_objects, ROLE_RELATION)
    return LabeledCorpus(ids, labels, roles, tuple(domains))
