"""Batched feature export: frozen backbone over a dataset, one row per image.

The output file is the spice binary embedding format; a JSON manifest next
to it records what produced the rows (checkpoint hash, architecture,
feature layer, input pipeline, N, D). Export runs the model in eval mode
with no augmentation, so repeated runs are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import DataLoader
from torchvision import transforms

from .backbone import load_backbone
from .datasets import SPLITS, build_dataset
from .errors import ExportConfigError, ExportError
from .writer import write_embeddings

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


@dataclass
class ExportJob:
    dataset: str
    checkpoint: str
    out: str
    split: str = "both"
    batch_size: int = 256
    device: str = "cpu"
    arch: str | None = None
    data_root: str = "./data"
    download: bool = True
    input_size: int | None = None  # None keeps each image at its native size
    mean: tuple = IMAGENET_MEAN
    std: tuple = IMAGENET_STD
    workers: int = 0

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ExportConfigError(f"split must be one of {SPLITS}, got {self.split!r}")
        if self.batch_size < 1:
            raise ExportConfigError("batch_size must be >= 1")
        if self.input_size is not None and self.input_size < 8:
            raise ExportConfigError("input_size must be >= 8")
        if len(self.mean) != 3 or len(self.std) != 3:
            raise ExportConfigError("mean/std need 3 channel values")


def build_transform(job: ExportJob):
    steps = []
    if job.input_size is not None:
        steps.append(transforms.Resize((job.input_size, job.input_size)))
    steps += [transforms.ToTensor(), transforms.Normalize(job.mean, job.std)]
    return transforms.Compose(steps)


def run_inference(model, dataset, batch_size: int, device: str = "cpu", workers: int = 0):
    """Forward every sample once; returns (features f32 [N,D], labels i64 [N])."""
    loader = DataLoader(
        dataset, batch_size=batch_size, shuffle=False, num_workers=workers
    )
    model.eval()
    feats, labels = [], []
    with torch.no_grad():
        for images, targets in loader:
            out = model(images.to(device))
            if out.ndim != 2:
                raise ExportError(f"backbone emitted shape {tuple(out.shape)}, want 2-D")
            feats.append(out.to("cpu", torch.float32).numpy())
            labels.append(np.asarray(targets, dtype=np.int64))
    if not feats:
        raise ExportError("dataset yielded no samples")
    return np.concatenate(feats), np.concatenate(labels)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def manifest_path(out) -> Path:
    return Path(str(out) + ".manifest.json")


def export(job: ExportJob) -> dict:
    """Run the job; writes the embedding file + manifest, returns the manifest."""
    model, info = load_backbone(job.checkpoint, job.arch, job.device)
    dataset = build_dataset(
        job.dataset, job.split, job.data_root, build_transform(job), job.download
    )
    features, labels = run_inference(
        model, dataset, job.batch_size, job.device, job.workers
    )
    labeled = bool(labels.min() >= 0)
    write_embeddings(job.out, features, labels if labeled else None)
    manifest = {
        "format": {"magic": "SPCE", "version": 1},
        "dataset": job.dataset,
        "split": job.split,
        "n": int(features.shape[0]),
        "d": int(features.shape[1]),
        "labeled": labeled,
        "checkpoint": {
            "path": str(job.checkpoint),
            "sha256": _sha256(job.checkpoint),
            "arch": info["arch"],
        },
        "feature_layer": info["feature_layer"],
        "input": {
            "size": job.input_size,
            "mean": list(job.mean),
            "std": list(job.std),
        },
    }
    with open(manifest_path(job.out), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
