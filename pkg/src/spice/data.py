"""Embedding datasets: binary/CSV persistence, synthetic Gaussian-mixture
generation, and feature-space weak/strong transforms.

Binary interchange format (little-endian):
    magic "SPCE" | version u32=1 | N u64 | D u32 | has_labels u8
    | N*D float32 row-major | N uint32 labels (if has_labels)

CSV convenience format: header ``# spice-csv v1 d=<D> labeled=<0|1>``,
then one row per sample with D float fields and an optional trailing
integer label.

Features live in memory as float64 but are quantized to float32 values at
creation/save time, so binary round-trips are bit-exact.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidInputError, ParseError
from .numeric import Array

_MAGIC = b"SPCE"
_VERSION = 1
_HEADER = struct.Struct("<4sIQIB")  # magic, version, N, D, has_labels

CSV_HEADER_PREFIX = "# spice-csv v1"


def _quantize_f32(x: Array) -> Array:
    """Snap float64 values onto the float32 grid (keeps dtype float64)."""
    return np.ascontiguousarray(x, dtype=np.float64).astype(np.float32).astype(np.float64)


@dataclass
class EmbeddingDataset:
    """N x D feature matrix with optional ground-truth labels."""

    features: Array
    true_labels: Array | None = None
    k_hint: int | None = None
    source: str = ""

    def __post_init__(self):
        self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        if self.features.ndim != 2:
            raise InvalidInputError("features must be a 2-D matrix")
        n, d = self.features.shape
        if n < 1 or d < 2:
            raise InvalidInputError(f"dataset needs N >= 1 and D >= 2, got {n}x{d}")
        if not np.all(np.isfinite(self.features)):
            raise InvalidInputError("features contain non-finite entries")
        if self.true_labels is not None:
            self.true_labels = np.asarray(self.true_labels, dtype=np.int64)
            if self.true_labels.shape != (n,):
                raise InvalidInputError("true_labels length must equal N")
            if self.true_labels.min() < 0:
                raise InvalidInputError("labels must be non-negative")
            if self.k_hint is None:
                self.k_hint = int(self.true_labels.max()) + 1
            elif self.true_labels.max() >= self.k_hint:
                raise InvalidInputError("label id outside [0, k_hint)")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingDataset):
            return NotImplemented
        if not np.array_equal(self.features, other.features):
            return False
        if (self.true_labels is None) != (other.true_labels is None):
            return False
        if self.true_labels is not None and not np.array_equal(
            self.true_labels, other.true_labels
        ):
            return False
        return True


def save_embeddings(dataset: EmbeddingDataset, path, format: str = "binary") -> None:
    """Write a dataset; binary round-trips bit-exactly via load_embeddings."""
    path = Path(path)
    if format == "binary":
        _save_binary(dataset, path)
    elif format == "csv":
        _save_csv(dataset, path)
    else:
        raise ConfigError(f"unknown format {format!r}")


def load_embeddings(path, format: str = "binary") -> EmbeddingDataset:
    """Load a dataset written by :func:`save_embeddings`."""
    path = Path(path)
    if format == "binary":
        return _load_binary(path)
    if format == "csv":
        return _load_csv(path)
    raise ConfigError(f"unknown format {format!r}")


def _save_binary(dataset: EmbeddingDataset, path: Path) -> None:
    n, d = dataset.features.shape
    has_labels = dataset.true_labels is not None
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, n, d, int(has_labels)))
        fh.write(np.ascontiguousarray(dataset.features, dtype="<f4").tobytes())
        if has_labels:
            fh.write(np.ascontiguousarray(dataset.true_labels, dtype="<u4").tobytes())


def _load_binary(path: Path) -> EmbeddingDataset:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ParseError(path, "byte 0", f"file too short for header ({len(data)} bytes)")
    magic, version, n, d, has_labels = _HEADER.unpack_from(data, 0)
    if magic != _MAGIC:
        raise ParseError(path, "byte 0", f"bad magic {magic!r}")
    if version != _VERSION:
        raise ParseError(path, "byte 4", f"unsupported version {version}")
    if has_labels not in (0, 1):
        raise ParseError(path, "byte 16", f"has_labels flag must be 0/1, got {has_labels}")
    feat_bytes = n * d * 4
    expected = _HEADER.size + feat_bytes + (n * 4 if has_labels else 0)
    if len(data) != expected:
        raise ParseError(
            path,
            f"byte {len(data)}",
            f"size mismatch: expected {expected} bytes for N={n}, D={d}",
        )
    raw = np.frombuffer(data, dtype="<f4", count=n * d, offset=_HEADER.size)
    features = raw.reshape(n, d).astype(np.float64)
    bad = ~np.isfinite(features)
    if bad.any():
        idx = int(np.flatnonzero(bad.ravel())[0])
        raise ParseError(
            path, f"byte {_HEADER.size + idx * 4}", "non-finite feature entry"
        )
    labels = None
    if has_labels:
        labels = np.frombuffer(
            data, dtype="<u4", count=n, offset=_HEADER.size + feat_bytes
        ).astype(np.int64)
    return EmbeddingDataset(features, labels, source=str(path))


def _save_csv(dataset: EmbeddingDataset, path: Path) -> None:
    labeled = dataset.true_labels is not None
    with open(path, "w") as fh:
        fh.write(f"{CSV_HEADER_PREFIX} d={dataset.d} labeled={int(labeled)}\n")
        for i in range(dataset.n):
            fields = [repr(float(v)) for v in dataset.features[i]]
            if labeled:
                fields.append(str(int(dataset.true_labels[i])))
            fh.write(",".join(fields) + "\n")


def _load_csv(path: Path) -> EmbeddingDataset:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(path, "line 1", "empty file")
    header = lines[0]
    if not header.startswith(CSV_HEADER_PREFIX):
        raise ParseError(path, "line 1", f"bad header {header!r}")
    try:
        parts = dict(p.split("=", 1) for p in header[len(CSV_HEADER_PREFIX):].split())
        d = int(parts["d"])
        labeled = int(parts["labeled"]) == 1
    except (KeyError, ValueError) as exc:
        raise ParseError(path, "line 1", f"malformed header fields: {exc}") from exc
    want = d + (1 if labeled else 0)
    rows, labels = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != want:
            raise ParseError(
                path, f"line {lineno}", f"expected {want} fields, got {len(fields)}"
            )
        try:
            values = [float(v) for v in fields[:d]]
        except ValueError as exc:
            raise ParseError(path, f"line {lineno}", f"bad float: {exc}") from exc
        if not all(np.isfinite(values)):
            raise ParseError(path, f"line {lineno}", "non-finite feature entry")
        rows.append(values)
        if labeled:
            try:
                labels.append(int(fields[d]))
            except ValueError as exc:
                raise ParseError(path, f"line {lineno}", f"bad label: {exc}") from exc
    if not rows:
        raise ParseError(path, "line 2", "no samples")
    features = np.asarray(rows, dtype=np.float64)
    return EmbeddingDataset(
        features, np.asarray(labels, dtype=np.int64) if labeled else None, source=str(path)
    )


def synth_gmm(
    k: int,
    d: int,
    n_per_cluster: int,
    center_separation: float,
    within_sigma: float,
    rng: np.random.Generator,
) -> EmbeddingDataset:
    """Balanced Gaussian-mixture embeddings with known labels.

    Cluster centers are random orthogonal directions scaled so every pair
    of centers is at least center_separation * within_sigma apart. When
    d < k orthogonality is unattainable; falls back to random unit
    directions with a minimum-angle retry and notes it in the provenance.
    """
    if k < 2 or d < 2:
        raise ConfigError(f"synth_gmm needs k >= 2 and d >= 2, got k={k}, d={d}")
    if center_separation <= 0:
        raise ConfigError("center_separation must be positive")
    if n_per_cluster < 1:
        raise ConfigError("n_per_cluster must be >= 1")

    fallback = d < k
    if not fallback:
        # QR of a random d x k Gaussian gives k orthonormal directions;
        # distance between any two is sqrt(2), so scale = sep*sigma/sqrt(2).
        q, _ = np.linalg.qr(rng.standard_normal((d, k)))
        dirs = q.T
        scale = center_separation * within_sigma / np.sqrt(2.0)
        centers = dirs * scale
    else:
        best, best_min = None, -np.inf
        for _ in range(20):
            dirs = rng.standard_normal((k, d))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            dist = np.linalg.norm(dirs[:, None, :] - dirs[None, :, :], axis=2)
            m = dist[~np.eye(k, dtype=bool)].min()
            if m > best_min:
                best, best_min = dirs, m
            if m > 0.5:  # min angle ~ 29 degrees
                break
        if best_min <= 1e-9:
            raise ConfigError("could not draw distinct center directions")
        centers = best * (center_separation * within_sigma / best_min)
        warnings.warn(
            f"synth_gmm: d={d} < k={k}, using random unit directions "
            f"(min pairwise distance scaled to separation)"
        )

    labels = np.repeat(np.arange(k, dtype=np.int64), n_per_cluster)
    n = labels.shape[0]
    features = centers[labels] + within_sigma * rng.standard_normal((n, d))
    perm = rng.permutation(n)
    features = _quantize_f32(features[perm])
    labels = labels[perm]
    source = (
        f"synth_gmm(k={k},d={d},n_per_cluster={n_per_cluster},"
        f"sep={center_separation},sigma={within_sigma})"
        + (",fallback=random-directions" if fallback else "")
    )
    return EmbeddingDataset(features, labels, k_hint=k, source=source)


@dataclass
class TransformConfig:
    """Feature-space perturbations standing in for weak/strong augmentation.

    weak: i.i.d. Gaussian noise of weak_noise_sigma (identity at 0).
    strong: Gaussian noise of strong_noise_sigma, then each coordinate
    zeroed independently with probability strong_dropout_rate.

    Sigmas may be scalars or per-dimension vectors; a strong sigma of None
    means "0.1 x per-dimension feature std", resolved against a dataset
    via :meth:`resolved`.
    """

    weak_noise_sigma: float | Array = 0.0
    strong_noise_sigma: float | Array | None = None
    strong_dropout_rate: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.strong_dropout_rate < 1.0:
            raise ConfigError("strong_dropout_rate must be in [0, 1)")
        if np.any(np.asarray(self.weak_noise_sigma) < 0):
            raise ConfigError("weak_noise_sigma must be >= 0")
        if self.strong_noise_sigma is not None:
            if np.any(np.asarray(self.strong_noise_sigma) < 0):
                raise ConfigError("strong_noise_sigma must be >= 0")
            if np.any(
                np.asarray(self.weak_noise_sigma) > np.asarray(self.strong_noise_sigma)
            ):
                raise ConfigError("weak_noise_sigma must not exceed strong_noise_sigma")

    def resolved(
        self, features: Array, strong_scale: float = 0.1, weak_scale: float | None = None
    ) -> "TransformConfig":
        """Fill data-dependent defaults from per-dimension feature std."""
        std = np.asarray(features, dtype=np.float64).std(axis=0)
        strong = (
            self.strong_noise_sigma
            if self.strong_noise_sigma is not None
            else strong_scale * std
        )
        weak = self.weak_noise_sigma if weak_scale is None else weak_scale * std
        return TransformConfig(weak, strong, self.strong_dropout_rate)


def transform(
    features: Array,
    cfg: TransformConfig,
    strength: str,
    rng: np.random.Generator,
) -> Array:
    """Apply the weak or strong perturbation; never changes the shape."""
    x = np.asarray(features, dtype=np.float64)
    if strength == "weak":
        sigma = np.asarray(cfg.weak_noise_sigma, dtype=np.float64)
        if np.all(sigma == 0.0):
            return x.copy()
        return x + sigma * rng.standard_normal(x.shape)
    if strength == "strong":
        if cfg.strong_noise_sigma is None:
            raise ConfigError("strong_noise_sigma unresolved; call cfg.resolved(features)")
        sigma = np.asarray(cfg.strong_noise_sigma, dtype=np.float64)
        out = x.copy()
        if np.any(sigma > 0.0):
            out = out + sigma * rng.standard_normal(x.shape)
        if cfg.strong_dropout_rate > 0.0:
            keep = rng.random(x.shape) >= cfg.strong_dropout_rate
            out = out * keep
        return out
    raise ConfigError(f"unknown transform strength {strength!r}")
