"""Local semantic consistency: score every sample by how many of its
nearest embedding neighbors share its label, and keep the samples whose
score strictly exceeds a threshold as the reliable labeled set.

Neighbor search is exact brute force over cosine similarity, chunked over
query rows; the query sample itself is excluded from its neighborhood.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidInputError, ParseError, ShapeError
from .numeric import Array

RELIABLE_HEADER_PREFIX = "# spice-reliable v1"


def _normalized_rows(F: Array) -> Array:
    F = np.asarray(F, dtype=np.float64)
    norms = np.linalg.norm(F, axis=1, keepdims=True)
    return np.divide(F, norms, out=np.zeros_like(F), where=norms > 0)


def knn_all(F: Array, n_s: int, chunk: int = 512) -> Array:
    """N x n_s neighbor ids by cosine similarity, self excluded.

    Ties break toward the lower index (stable sort on negated similarity).
    """
    F = np.asarray(F, dtype=np.float64)
    n = F.shape[0]
    if not 1 <= n_s < n:
        raise InvalidInputError(f"n_s={n_s} outside [1, N-1={n - 1}]")
    fn = _normalized_rows(F)
    out = np.empty((n, n_s), dtype=np.int64)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        sims = fn[start:stop] @ fn.T
        sims[np.arange(stop - start), np.arange(start, stop)] = -np.inf
        order = np.argsort(-sims, axis=1, kind="stable")
        out[start:stop] = order[:, :n_s]
    return out


def knn_indices(F: Array, i: int, n_s: int) -> Array:
    """Neighbor ids of one query sample."""
    F = np.asarray(F, dtype=np.float64)
    n = F.shape[0]
    if not 1 <= n_s < n:
        raise InvalidInputError(f"n_s={n_s} outside [1, N-1={n - 1}]")
    fn = _normalized_rows(F)
    sims = fn @ fn[i]
    sims[i] = -np.inf
    return np.argsort(-sims, kind="stable")[:n_s]


def local_consistency(F: Array, labels, n_s: int) -> Array:
    """Per-sample fraction of the n_s nearest neighbors sharing its label."""
    y = np.asarray(labels, dtype=np.int64).ravel()
    F = np.asarray(F, dtype=np.float64)
    if y.shape[0] != F.shape[0]:
        raise ShapeError(f"{y.shape[0]} labels for {F.shape[0]} samples")
    nn = knn_all(F, n_s)
    return (y[nn] == y[:, None]).mean(axis=1)


@dataclass
class ReliableSet:
    """Samples whose local consistency strictly exceeds tau_c."""

    indices: Array
    labels: Array
    beta: Array
    n_s: int
    tau_c: float
    n_total: int
    k: int
    starved_clusters: list[int]

    def __len__(self) -> int:
        return int(self.indices.shape[0])

    @property
    def coverage(self) -> float:
        return len(self) / self.n_total

    @property
    def starved(self) -> bool:
        return bool(self.starved_clusters)

    def per_cluster_counts(self) -> Array:
        return np.bincount(self.labels, minlength=self.k)


def select_reliable(
    F: Array, labels, n_s: int, tau_c: float, k: int | None = None
) -> ReliableSet:
    """Keep exactly the samples with consistency > tau_c (strict).

    A cluster with zero surviving samples marks the set as starved; callers
    decide whether that disables the semi-supervised stage.
    """
    if not 0.0 < tau_c <= 1.0:
        raise ConfigError(f"tau_c must be in (0, 1], got {tau_c}")
    y = np.asarray(labels, dtype=np.int64).ravel()
    if k is None:
        k = int(y.max()) + 1
    beta = local_consistency(F, y, n_s)
    keep = np.flatnonzero(beta > tau_c)
    kept_labels = y[keep]
    counts = np.bincount(kept_labels, minlength=k)
    starved = [int(c) for c in np.flatnonzero(counts == 0)]
    return ReliableSet(
        indices=keep,
        labels=kept_labels,
        beta=beta[keep],
        n_s=n_s,
        tau_c=tau_c,
        n_total=int(y.shape[0]),
        k=int(k),
        starved_clusters=starved,
    )


def save_reliable(rel: ReliableSet, path) -> None:
    """Text format: header line, then `<sample_index> <label> <beta>` rows."""
    with open(path, "w") as fh:
        fh.write(f"{RELIABLE_HEADER_PREFIX} n_s={rel.n_s} tau_c={rel.tau_c!r}\n")
        for i, lab, b in zip(rel.indices, rel.labels, rel.beta):
            fh.write(f"{int(i)} {int(lab)} {float(b)!r}\n")


def load_reliable(path, n_total: int | None = None, k: int | None = None) -> ReliableSet:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith(RELIABLE_HEADER_PREFIX):
        raise ParseError(path, "line 1", "bad header")
    try:
        parts = dict(p.split("=", 1) for p in lines[0][len(RELIABLE_HEADER_PREFIX):].split())
        n_s = int(parts["n_s"])
        tau_c = float(parts["tau_c"])
    except (KeyError, ValueError) as exc:
        raise ParseError(path, "line 1", f"malformed header fields: {exc}") from exc
    idx, labs, betas = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ParseError(path, f"line {lineno}", f"expected 3 fields, got {len(fields)}")
        try:
            idx.append(int(fields[0]))
            labs.append(int(fields[1]))
            betas.append(float(fields[2]))
        except ValueError as exc:
            raise ParseError(path, f"line {lineno}", str(exc)) from exc
    indices = np.asarray(idx, dtype=np.int64)
    labels = np.asarray(labs, dtype=np.int64)
    if k is None:
        k = int(labels.max()) + 1 if labels.size else 0
    if n_total is None:
        n_total = int(indices.max()) + 1 if indices.size else 0
    counts = np.bincount(labels, minlength=k)
    starved = [int(c) for c in np.flatnonzero(counts == 0)]
    return ReliableSet(
        indices=indices,
        labels=labels,
        beta=np.asarray(betas, dtype=np.float64),
        n_s=n_s,
        tau_c=tau_c,
        n_total=n_total,
        k=k,
        starved_clusters=starved,
    )


def subset_purity(rel: ReliableSet, truth) -> float:
    """Fraction of reliable labels equal to ground truth (diagnostics only)."""
    t = np.asarray(truth, dtype=np.int64).ravel()
    if len(rel) == 0:
        return float("nan")
    return float(np.mean(rel.labels == t[rel.indices]))
