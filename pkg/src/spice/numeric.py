"""Dense numeric substrate: softmax, cosine similarity, top-k selection,
seeded counter-based RNG streams, and a central finite-difference gradient
checker.

Matrices are plain float64 numpy arrays (row-major). All randomness flows
through explicitly passed generators created by :func:`make_rng`; there is
no global RNG state anywhere in the package.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateInputError, InvalidInputError

Array = np.ndarray


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Create a deterministic generator for (seed, stream...).

    Distinct stream tuples give statistically independent streams for the
    same seed, so per-head / per-epoch randomness does not depend on
    scheduling or on how many other streams exist.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def as_f64_matrix(x, name: str = "matrix") -> Array:
    """Coerce to a 2-D float64 array, rejecting non-finite entries."""
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise InvalidInputError(f"{name}: expected 2-D array, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name}: non-finite entries")
    return a


def softmax(logits) -> Array:
    """Numerically stabilized softmax along the last axis.

    Accepts a vector or a matrix of row vectors; rows sum to 1 within 1e-12.
    """
    z = np.asarray(logits, dtype=np.float64)
    if z.shape[-1] < 2:
        raise InvalidInputError("softmax: need at least 2 logits")
    if not np.all(np.isfinite(z)):
        raise InvalidInputError("softmax: non-finite logits")
    shifted = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=-1, keepdims=True)


def softmax_vjp(p: Array, grad_out: Array) -> Array:
    """Pull a gradient w.r.t. softmax outputs back to its inputs.

    `p` is the softmax output; implements p * (g - <g, p>) row-wise.
    """
    inner = np.sum(grad_out * p, axis=-1, keepdims=True)
    return p * (grad_out - inner)


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between two non-zero vectors, in [-1, 1]."""
    va = np.asarray(a, dtype=np.float64).ravel()
    vb = np.asarray(b, dtype=np.float64).ravel()
    if va.shape != vb.shape:
        raise InvalidInputError(
            f"cosine_similarity: length mismatch {va.shape[0]} vs {vb.shape[0]}"
        )
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise DegenerateInputError("cosine_similarity: zero-norm vector")
    # normalize before the dot product so huge magnitudes cannot overflow;
    # clip because rounding may push |value| infinitesimally past 1
    return float(np.clip(np.dot(va / na, vb / nb), -1.0, 1.0))


def cosine_similarity_matrix(rows: Array, centers: Array) -> Array:
    """Cosine similarity between every row of `rows` and every row of `centers`.

    Zero-norm rows on either side yield similarity 0 to everything (callers
    that must reject degenerate rows check norms themselves).
    """
    rn = np.linalg.norm(rows, axis=1, keepdims=True)
    cn = np.linalg.norm(centers, axis=1, keepdims=True)
    rs = np.divide(rows, rn, out=np.zeros_like(rows), where=rn > 0)
    cs = np.divide(centers, cn, out=np.zeros_like(centers), where=cn > 0)
    return rs @ cs.T


def top_k_indices(values, n: int) -> Array:
    """Indices of the n largest values, descending; ties broken by lower index.

    Deterministic: stable sort on negated values preserves index order
    among equal entries.
    """
    v = np.asarray(values, dtype=np.float64).ravel()
    if not 1 <= n <= v.shape[0]:
        raise InvalidInputError(f"top_k_indices: n={n} outside [1, {v.shape[0]}]")
    order = np.argsort(-v, kind="stable")
    return order[:n]


def finite_diff_gradient(
    f: Callable[[Array], float], x, h: float = 1e-5
) -> Array:
    """Central finite-difference gradient of a scalar function.

    (f(x + h e_j) - f(x - h e_j)) / 2h for every coordinate j.
    """
    x = np.asarray(x, dtype=np.float64).copy()
    g = np.zeros_like(x)
    flat = x.ravel()
    gflat = g.ravel()
    for j in range(flat.shape[0]):
        orig = flat[j]
        flat[j] = orig + h
        fp = f(x)
        flat[j] = orig - h
        fm = f(x)
        flat[j] = orig
        gflat[j] = (fp - fm) / (2.0 * h)
    return g


def relative_error(approx: Array, exact: Array, floor: float = 1e-300) -> float:
    """||approx - exact|| / max(||exact||, floor) over flattened arrays."""
    a = np.asarray(approx, dtype=np.float64).ravel()
    e = np.asarray(exact, dtype=np.float64).ravel()
    denom = max(float(np.linalg.norm(e)), floor)
    return float(np.linalg.norm(a - e) / denom)


def pack_params(params: Sequence[Array]) -> Array:
    """Flatten a sequence of arrays into one vector (for gradient checks)."""
    return np.concatenate([np.asarray(p, dtype=np.float64).ravel() for p in params])


def unpack_params(vec: Array, shapes: Sequence[tuple]) -> list[Array]:
    """Inverse of :func:`pack_params` given the original shapes."""
    out = []
    pos = 0
    for shape in shapes:
        size = int(np.prod(shape)) if shape else 1
        out.append(np.asarray(vec[pos : pos + size], dtype=np.float64).reshape(shape))
        pos += size
    return out
