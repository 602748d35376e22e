"""Clustering evaluation: optimal-assignment accuracy, NMI, ARI.

Accuracy maximizes the matched diagonal mass over label bijections via the
assignment algorithm on the negated contingency matrix; an exhaustive
permutation oracle is provided for small label sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidInputError
from .numeric import Array


def _as_labels(x, name: str) -> Array:
    a = np.asarray(x, dtype=np.int64).ravel()
    if a.size and a.min() < 0:
        raise InvalidInputError(f"{name}: negative label")
    return a


def contingency_matrix(pred, truth) -> Array:
    """Square count matrix C[i, j] = #{pred == i and truth == j}."""
    p = _as_labels(pred, "pred")
    t = _as_labels(truth, "truth")
    if p.shape != t.shape:
        raise InvalidInputError(f"length mismatch: {p.shape[0]} vs {t.shape[0]}")
    size = int(max(p.max(initial=-1), t.max(initial=-1))) + 1
    c = np.zeros((size, size), dtype=np.int64)
    np.add.at(c, (p, t), 1)
    return c


def accuracy(pred, truth) -> tuple[float, dict[int, int]]:
    """Best label-permutation match rate and the cluster -> class mapping."""
    c = contingency_matrix(pred, truth)
    rows, cols = linear_sum_assignment(-c)
    acc = float(c[rows, cols].sum()) / float(np.asarray(pred).size)
    mapping = {int(r): int(col) for r, col in zip(rows, cols)}
    return acc, mapping


def accuracy_exhaustive(pred, truth) -> float:
    """Accuracy by brute force over all label permutations (small k only)."""
    c = contingency_matrix(pred, truth)
    size = c.shape[0]
    if size > 8:
        raise InvalidInputError(f"exhaustive search infeasible for {size} labels")
    n = np.asarray(pred).size
    best = max(sum(c[i, perm[i]] for i in range(size)) for perm in permutations(range(size)))
    return float(best) / float(n)


def _entropy(counts: Array) -> float:
    p = counts[counts > 0].astype(np.float64)
    p /= p.sum()
    return float(-np.sum(p * np.log(p)))


def nmi(pred, truth) -> float:
    """Mutual information normalized by the geometric mean of entropies.

    Degenerate conventions: both labelings constant -> 1.0 (identical
    one-block partitions); exactly one constant -> 0.0.
    """
    return _nmi(pred, truth, "geometric")


def nmi_arithmetic(pred, truth) -> float:
    """NMI variant normalized by the arithmetic mean of entropies."""
    return _nmi(pred, truth, "arithmetic")


def _nmi(pred, truth, average: str) -> float:
    c = contingency_matrix(pred, truth).astype(np.float64)
    n = c.sum()
    a = c.sum(axis=1)
    b = c.sum(axis=0)
    ha = _entropy(a)
    hb = _entropy(b)
    if ha == 0.0 and hb == 0.0:
        return 1.0
    if ha == 0.0 or hb == 0.0:
        return 0.0
    nz = c > 0
    pij = c[nz] / n
    outer = np.outer(a / n, b / n)[nz]
    mi = float(np.sum(pij * np.log(pij / outer)))
    denom = np.sqrt(ha * hb) if average == "geometric" else 0.5 * (ha + hb)
    return mi / denom


def ari(pred, truth) -> float:
    """Adjusted Rand index from pair counts on the contingency matrix."""
    p = _as_labels(pred, "pred")
    if p.size < 2:
        raise InvalidInputError("ari needs at least 2 samples")
    c = contingency_matrix(pred, truth).astype(np.float64)
    n = c.sum()
    a = c.sum(axis=1)
    b = c.sum(axis=0)

    def comb2(x):
        return (x * (x - 1.0)) / 2.0

    sum_ij = comb2(c).sum()
    sum_a = comb2(a).sum()
    sum_b = comb2(b).sum()
    expected = sum_a * sum_b / comb2(n)
    denom = 0.5 * (sum_a + sum_b) - expected
    if denom == 0.0:
        return 1.0  # both partitions trivial and identical
    return float((sum_ij - expected) / denom)


@dataclass
class ClusterEval:
    """Bundle of all three metrics plus the assignment details."""

    acc: float
    nmi: float
    ari: float
    mapping: dict[int, int]
    contingency: Array


def evaluate(pred, truth) -> ClusterEval:
    acc_value, mapping = accuracy(pred, truth)
    return ClusterEval(
        acc=acc_value,
        nmi=nmi(pred, truth),
        ari=ari(pred, truth),
        mapping=mapping,
        contingency=contingency_matrix(pred, truth),
    )
