"""Writer for the spice binary embedding interchange format.

Layout (little-endian), version 1:
    magic "SPCE" | version u32=1 | N u64 | D u32 | has_labels u8
    | N*D float32 row-major | N uint32 labels (if has_labels)

This is the only coupling point with the clustering package: anything
written here must load byte-for-byte through its reader.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import ExportError

MAGIC = b"SPCE"
VERSION = 1
_HEADER = struct.Struct("<4sIQIB")  # magic, version, N, D, has_labels


def encode_embeddings(features, labels=None) -> bytes:
    """Serialize a feature matrix (+ optional labels) to format bytes."""
    feats = np.ascontiguousarray(features, dtype="<f4")
    if feats.ndim != 2:
        raise ExportError(f"features must be 2-D, got shape {feats.shape}")
    n, d = feats.shape
    if n < 1 or d < 2:
        raise ExportError(f"need N >= 1 and D >= 2, got {n}x{d}")
    if not np.all(np.isfinite(feats)):
        raise ExportError("features contain non-finite entries")
    out = [_HEADER.pack(MAGIC, VERSION, n, d, int(labels is not None))]
    out.append(feats.tobytes())
    if labels is not None:
        lab = np.asarray(labels)
        if lab.shape != (n,):
            raise ExportError(f"labels length {lab.shape} does not match N={n}")
        if lab.min() < 0:
            raise ExportError("labels must be non-negative")
        out.append(np.ascontiguousarray(lab, dtype="<u4").tobytes())
    return b"".join(out)


def write_embeddings(path, features, labels=None) -> None:
    Path(path).write_bytes(encode_embeddings(features, labels))
