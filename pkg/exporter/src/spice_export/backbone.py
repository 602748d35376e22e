"""Frozen ResNet backbones restored from contrastive-pretraining checkpoints.

Checkpoints in the wild wrap the encoder in various ways: momentum-contrast
training scripts save the query encoder under ``module.encoder_q.`` inside a
``state_dict`` entry (with a 2-layer MLP projection head at ``fc.*``), plain
torchvision checkpoints are bare state dicts. This module normalizes all of
them to a torchvision ResNet with the classifier removed, so the forward
pass emits the pooled penultimate features.
"""

from __future__ import annotations

import warnings
from pathlib import Path

import torch
from torch import nn
from torchvision import models

from .errors import CheckpointError

ARCHS = {
    "resnet18": models.resnet18,
    "resnet34": models.resnet34,
    "resnet50": models.resnet50,
}

FEATURE_LAYER = "avgpool"  # global average pool, just before the classifier

# Tried in order; the first prefix whose stripped keys contain conv1.weight wins.
_PREFIXES = ("module.encoder_q.", "encoder_q.", "module.", "")


def _raw_state(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        raw = torch.load(path, map_location="cpu", weights_only=True)
    except Exception:
        # Older checkpoints pickle extras (argparse namespaces etc.) that the
        # restricted loader rejects; fall back to the permissive one.
        try:
            raw = torch.load(path, map_location="cpu", weights_only=False)
            warnings.warn(f"{path}: loaded with weights_only=False")
        except Exception as exc:
            raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    return raw


def extract_backbone_state(raw) -> dict:
    """Pull the encoder's parameter dict out of an arbitrary checkpoint blob."""
    state = raw
    if isinstance(raw, dict):
        for key in ("state_dict", "model"):
            if key in raw and isinstance(raw[key], dict):
                state = raw[key]
                break
    if not isinstance(state, dict) or not all(isinstance(k, str) for k in state):
        raise CheckpointError("checkpoint holds no parameter dict")
    for prefix in _PREFIXES:
        if prefix + "conv1.weight" in state:
            stripped = {
                k[len(prefix):]: v for k, v in state.items() if k.startswith(prefix)
            }
            # Drop the classifier / projection head; only the trunk is wanted.
            return {k: v for k, v in stripped.items() if not k.startswith("fc.")}
    raise CheckpointError(
        "no recognizable backbone keys (looked for conv1.weight under "
        f"prefixes {_PREFIXES})"
    )


def infer_arch(state: dict) -> str:
    """Guess the ResNet variant from block structure."""
    if any(".conv3." in k for k in state):
        return "resnet50"
    blocks = [int(k.split(".")[1]) for k in state if k.startswith("layer1.")]
    if not blocks:
        raise CheckpointError("state dict has no layer1 blocks; not a ResNet trunk")
    return "resnet34" if max(blocks) + 1 >= 3 else "resnet18"


def load_backbone(path, arch: str | None = None, device: str = "cpu"):
    """Restore a frozen feature extractor; returns (model, info dict)."""
    state = extract_backbone_state(_raw_state(path))
    arch = arch or infer_arch(state)
    if arch not in ARCHS:
        raise CheckpointError(f"unsupported arch {arch!r}; known: {sorted(ARCHS)}")
    model = ARCHS[arch](num_classes=1)
    model.fc = nn.Identity()
    try:
        model.load_state_dict(state, strict=True)
    except RuntimeError as exc:
        raise CheckpointError(f"checkpoint does not fit {arch}: {exc}") from exc
    model.eval()
    for p in model.parameters():
        p.requires_grad_(False)
    return model.to(device), {"arch": arch, "feature_layer": FEATURE_LAYER}
