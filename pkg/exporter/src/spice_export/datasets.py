"""Image-dataset builders keyed by name, with download retry.

Each builder takes (split, root, transform, download) and returns a torch
Dataset yielding (image_tensor, int_label) pairs; label -1 marks an
unlabeled sample. register_dataset() lets callers (and tests) add sources
without touching the CLI.
"""

from __future__ import annotations

import time

from torch.utils.data import ConcatDataset
from torchvision import datasets as tvd

from .errors import DatasetError, ExportConfigError

SPLITS = ("train", "test", "both")

# Reference row counts for the built-in sources (labeled splits).
EXPECTED_COUNTS = {
    ("stl10", "train"): 5000,
    ("stl10", "test"): 8000,
    ("stl10", "both"): 13000,
    ("cifar10", "train"): 50000,
    ("cifar10", "test"): 10000,
    ("cifar10", "both"): 60000,
}


def with_retry(build, attempts: int = 2, wait: float = 2.0):
    """Run a dataset constructor, retrying once on transient failure."""
    last = None
    for i in range(attempts):
        try:
            return build()
        except Exception as exc:  # urllib/RuntimeError, depending on backend
            last = exc
            if i + 1 < attempts:
                time.sleep(wait)
    raise DatasetError(f"dataset acquisition failed after {attempts} attempts: {last}")


def _stl10(split, root, transform, download):
    parts = {"train": ("train",), "test": ("test",), "both": ("train", "test")}[split]
    built = [
        with_retry(
            lambda s=s: tvd.STL10(root, split=s, transform=transform, download=download)
        )
        for s in parts
    ]
    return built[0] if len(built) == 1 else ConcatDataset(built)


def _cifar10(split, root, transform, download):
    parts = {"train": (True,), "test": (False,), "both": (True, False)}[split]
    built = [
        with_retry(
            lambda t=t: tvd.CIFAR10(root, train=t, transform=transform, download=download)
        )
        for t in parts
    ]
    return built[0] if len(built) == 1 else ConcatDataset(built)


DATASETS = {"stl10": _stl10, "cifar10": _cifar10}


def register_dataset(name: str, builder) -> None:
    DATASETS[name] = builder


def build_dataset(name, split, root, transform, download):
    if name not in DATASETS:
        raise ExportConfigError(f"unknown dataset {name!r}; known: {sorted(DATASETS)}")
    if split not in SPLITS:
        raise ExportConfigError(f"split must be one of {SPLITS}, got {split!r}")
    return DATASETS[name](split, root, transform, download)
