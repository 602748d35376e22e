"""Per-batch semantic pseudo-labeling: pick the most confident samples per
cluster, average their embeddings into prototypes, then label each
prototype's nearest samples by cosine similarity.

Overlap mode lets one sample carry labels from several clusters (it enters
training once per label); non-overlap mode resolves contested samples in
favor of their most-similar center without refilling the vacated slots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError
from .numeric import Array, cosine_similarity_matrix, top_k_indices

ASSIGNMENT_MODES = ("overlap", "non_overlap")


@dataclass
class PseudoLabelConfig:
    k: int
    confident_ratio: float = 0.5
    assignment_mode: str = "overlap"
    n_per_cluster: int | None = None  # default: floor(M / k) at call time

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError("k must be >= 2")
        if not 0.0 < self.confident_ratio <= 1.0:
            raise ConfigError("confident_ratio must be in (0, 1]")
        if self.assignment_mode not in ASSIGNMENT_MODES:
            raise ConfigError(f"assignment_mode must be one of {ASSIGNMENT_MODES}")
        if self.n_per_cluster is not None and self.n_per_cluster < 1:
            raise ConfigError("n_per_cluster must be >= 1")

    def resolve_n_confident(self, m: int) -> int:
        n_t = int(self.confident_ratio * m / self.k)
        if n_t < 1:
            raise ConfigError(
                f"confident_ratio {self.confident_ratio} with batch {m} and "
                f"k {self.k} selects zero samples per cluster"
            )
        return n_t

    def resolve_n_assign(self, m: int) -> int:
        if self.n_per_cluster is not None:
            return self.n_per_cluster
        return max(1, m // self.k)


@dataclass
class PseudoBatch:
    """Labeled subset of one large batch.

    sample_indices are batch-local; duplicates occur in overlap mode when a
    sample sits among the nearest of several prototypes. Clusters whose
    prototype came out zero-norm contribute no entries and are listed in
    degenerate_clusters.
    """

    sample_indices: Array
    labels: Array
    centers: Array
    degenerate_clusters: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return int(self.sample_indices.shape[0])


def confident_indices(P: Array, c: int, cfg: PseudoLabelConfig) -> Array:
    """Indices of the most confidently cluster-c samples (column top-n_t)."""
    P = np.asarray(P, dtype=np.float64)
    m = P.shape[0]
    if P.shape[1] != cfg.k:
        raise ShapeError(f"P has {P.shape[1]} columns, config says k={cfg.k}")
    if m < cfg.k:
        raise ConfigError(f"batch of {m} smaller than k={cfg.k}")
    n_t = cfg.resolve_n_confident(m)
    return top_k_indices(P[:, c], n_t)


def compute_prototypes(F: Array, P: Array, cfg: PseudoLabelConfig) -> Array:
    """Cluster centers: mean embedding of each cluster's confident samples."""
    F = np.asarray(F, dtype=np.float64)
    P = np.asarray(P, dtype=np.float64)
    if F.shape[0] != P.shape[0]:
        raise ShapeError(f"F has {F.shape[0]} rows, P has {P.shape[0]}")
    centers = np.empty((cfg.k, F.shape[1]))
    for c in range(cfg.k):
        centers[c] = F[confident_indices(P, c, cfg)].mean(axis=0)
    return centers


def assign_labels(F: Array, centers: Array, cfg: PseudoLabelConfig) -> PseudoBatch:
    """Label each cluster's n most cosine-similar samples with that cluster."""
    F = np.asarray(F, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    if centers.shape[0] != cfg.k:
        raise ShapeError(f"{centers.shape[0]} centers for k={cfg.k}")
    m = F.shape[0]
    n = cfg.resolve_n_assign(m)
    if n > m:
        raise ConfigError(f"n_per_cluster {n} exceeds batch size {m}")

    sims = cosine_similarity_matrix(F, centers)
    degenerate = [c for c in range(cfg.k) if np.linalg.norm(centers[c]) == 0.0]
    live = [c for c in range(cfg.k) if c not in degenerate]
    nearest = {c: top_k_indices(sims[:, c], n) for c in live}

    if cfg.assignment_mode == "overlap":
        idx = np.concatenate([nearest[c] for c in live]) if live else np.empty(0, dtype=np.int64)
        lab = np.concatenate([np.full(n, c, dtype=np.int64) for c in live]) if live else np.empty(0, dtype=np.int64)
    else:
        # contested samples keep only their most-similar claimant (tie: lower id)
        winner: dict[int, int] = {}
        for c in live:
            for i in nearest[c]:
                i = int(i)
                if i not in winner:
                    winner[i] = c
                else:
                    prev = winner[i]
                    if sims[i, c] > sims[i, prev]:
                        winner[i] = c
        idx_list, lab_list = [], []
        for c in live:
            for i in nearest[c]:
                if winner[int(i)] == c:
                    idx_list.append(int(i))
                    lab_list.append(c)
        idx = np.asarray(idx_list, dtype=np.int64)
        lab = np.asarray(lab_list, dtype=np.int64)

    return PseudoBatch(idx, lab, centers, degenerate)


def pseudo_label(F: Array, P: Array, cfg: PseudoLabelConfig) -> PseudoBatch:
    """Full labeling pass for one batch: prototypes, then nearest-sample labels."""
    return assign_labels(F, compute_prototypes(F, P, cfg), cfg)
