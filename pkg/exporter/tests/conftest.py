import numpy as np
import pytest
import torch
from torch import nn
from torchvision import models


class TensorPairs(torch.utils.data.Dataset):
    """Pre-materialized (image, label) pairs; stands in for a real source."""

    def __init__(self, images, labels):
        self.images = images
        self.labels = labels

    def __len__(self):
        return len(self.images)

    def __getitem__(self, i):
        return self.images[i], self.labels[i]


def make_toy(n, size=32, label=lambda i: i % 3, seed=7):
    rng = np.random.default_rng(seed)
    images = [
        torch.from_numpy(rng.random((3, size, size), dtype=np.float32))
        for _ in range(n)
    ]
    return TensorPairs(images, [label(i) for i in range(n)])


def toy_builder(split, root, transform, download):
    # Tensors are pre-built, so the image transform is not applicable here.
    n = {"train": 6, "test": 4, "both": 10}[split]
    return make_toy(n)


@pytest.fixture(scope="session")
def trunk_state():
    """Random-init resnet18 trunk parameters (classifier dropped)."""
    torch.manual_seed(0)
    state = models.resnet18(num_classes=1).state_dict()
    return {k: v for k, v in state.items() if not k.startswith("fc.")}


@pytest.fixture(scope="session")
def moco_ckpt(tmp_path_factory, trunk_state):
    """Checkpoint shaped like a momentum-contrast training snapshot."""
    wrapped = {"module.encoder_q." + k: v for k, v in trunk_state.items()}
    # 2-layer MLP projection head, present in the file but not part of the trunk.
    wrapped["module.encoder_q.fc.0.weight"] = torch.zeros(512, 512)
    wrapped["module.encoder_q.fc.0.bias"] = torch.zeros(512)
    wrapped["module.encoder_q.fc.2.weight"] = torch.zeros(128, 512)
    wrapped["module.encoder_q.fc.2.bias"] = torch.zeros(128)
    path = tmp_path_factory.mktemp("ckpt") / "moco_style.pth"
    torch.save({"state_dict": wrapped, "epoch": 200, "arch": "resnet18"}, path)
    return path


class StubBackbone(nn.Module):
    """Tiny deterministic feature extractor for pipeline tests."""

    def __init__(self, d=8):
        super().__init__()
        torch.manual_seed(3)
        self.conv = nn.Conv2d(3, d, kernel_size=3, padding=1)
        self.pool = nn.AdaptiveAvgPool2d(1)

    def forward(self, x):
        return self.pool(self.conv(x)).flatten(1)
