"""k-means baseline with k-means++ seeding and Lloyd iterations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .numeric import Array, make_rng


@dataclass
class KMeansResult:
    centers: Array
    labels: Array
    inertia: float
    iterations: int


def _features_of(data) -> Array:
    feats = getattr(data, "features", data)
    return np.asarray(feats, dtype=np.float64)


def _sq_dists(x: Array, centers: Array) -> Array:
    # (N, k) squared Euclidean distances, clipped against rounding
    d2 = (
        np.sum(x * x, axis=1)[:, None]
        - 2.0 * (x @ centers.T)
        + np.sum(centers * centers, axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _plus_plus_seed(x: Array, k: int, rng: np.random.Generator) -> Array:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))  # all mass on existing centers
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[c] = x[idx]
        d2 = np.minimum(d2, np.sum((x - centers[c]) ** 2, axis=1))
    return centers


def _lloyd(x: Array, centers: Array, max_iter: int) -> tuple[Array, Array, float, int]:
    n, k = x.shape[0], centers.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    inertia = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        d2 = _sq_dists(x, centers)
        new_labels = np.argmin(d2, axis=1)
        new_inertia = float(d2[np.arange(n), new_labels].sum())
        assert new_inertia <= inertia + 1e-9 * max(1.0, inertia), "inertia increased"
        inertia = new_inertia
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=k)
        for c in range(k):
            if counts[c] > 0:
                centers[c] = x[labels == c].mean(axis=0)
        # repair empty clusters: steal the farthest point from the largest cluster
        for c in np.flatnonzero(counts == 0):
            big = int(np.argmax(counts))
            members = np.flatnonzero(labels == big)
            far = members[np.argmax(np.sum((x[members] - centers[big]) ** 2, axis=1))]
            labels[far] = c
            centers[c] = x[far]
            counts[big] -= 1
            counts[c] += 1
            centers[big] = x[labels == big].mean(axis=0)
    d2 = _sq_dists(x, centers)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(n), labels].sum())
    return centers, labels, inertia, it


def kmeans(
    data,
    k: int,
    max_iter: int = 100,
    n_init: int = 10,
    rng: np.random.Generator | None = None,
    normalize: bool = False,
) -> KMeansResult:
    """Best-of-n_init Lloyd runs seeded by k-means++.

    `normalize` pre-scales rows to unit L2 norm (spherical behavior).
    Deterministic for a fixed generator.
    """
    x = _features_of(data)
    if k < 1 or k > x.shape[0]:
        raise InvalidInputError(f"k={k} outside [1, N={x.shape[0]}]")
    if rng is None:
        rng = make_rng(0)
    if normalize:
        norms = np.linalg.norm(x, axis=1, keepdims=True)
        x = np.divide(x, norms, out=np.zeros_like(x), where=norms > 0)
    init_seeds = rng.integers(0, 2**63 - 1, size=n_init)
    best: KMeansResult | None = None
    for s in init_seeds:
        sub = make_rng(int(s))
        centers = _plus_plus_seed(x, k, sub)
        centers, labels, inertia, iters = _lloyd(x, centers.copy(), max_iter)
        if best is None or inertia < best.inertia:
            best = KMeansResult(centers, labels, inertia, iters)
    return best
