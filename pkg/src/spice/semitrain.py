"""Semi-supervised boosting from a reliable labeled subset.

A fresh three-layer classifier is trained with a FixMatch-style joint
objective: standard cross-entropy on weakly transformed reliable samples,
plus a consistency term on unlabeled samples where confident predictions
on a weak view (treated as constants) supervise a strong view. Unlabeled
samples whose weak-view confidence is below the gate contribute nothing.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import EmbeddingDataset, TransformConfig, transform
from .errors import (
    ClusterStarvationError,
    ConfigError,
    InvalidInputError,
    NumericFailureError,
    ParseError,
    ShapeError,
)
from .head import OptimizerState, optimizer_step, glorot_uniform
from .numeric import Array, make_rng, softmax
from .reliability import ReliableSet

SEMI_MAGIC = b"SPSH"
_SEMI_HEADER = struct.Struct("<4sIIII")  # magic, version, d, hidden, k

_STREAM_SEMI_INIT = 11
_STREAM_SEMI_BATCH = 12


@dataclass
class SemiHead:
    """Three fully-connected layers D -> H -> H -> k, ReLU hidden, softmax out."""

    w1: Array
    b1: Array
    w2: Array
    b2: Array
    w3: Array
    b3: Array

    @property
    def d(self) -> int:
        return self.w1.shape[0]

    @property
    def hidden(self) -> int:
        return self.w1.shape[1]

    @property
    def k(self) -> int:
        return self.w3.shape[1]

    def params(self) -> dict[str, Array]:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2,
                "w3": self.w3, "b3": self.b3}

    def copy(self) -> "SemiHead":
        return SemiHead(*(p.copy() for p in self.params().values()))


def init_semi_head(d: int, hidden: int, k: int, rng: np.random.Generator) -> SemiHead:
    if d < 2 or k < 2 or hidden < 1:
        raise ConfigError(f"bad semi head dims d={d}, hidden={hidden}, k={k}")
    return SemiHead(
        w1=glorot_uniform(rng, d, hidden, (d, hidden)),
        b1=np.zeros(hidden),
        w2=glorot_uniform(rng, hidden, hidden, (hidden, hidden)),
        b2=np.zeros(hidden),
        w3=glorot_uniform(rng, hidden, k, (hidden, k)),
        b3=np.zeros(k),
    )


def _forward_semi_cached(model: SemiHead, x: Array):
    if x.shape[1] != model.d:
        raise ShapeError(f"features have D={x.shape[1]}, model expects {model.d}")
    z1 = x @ model.w1 + model.b1
    h1 = np.maximum(z1, 0.0)
    z2 = h1 @ model.w2 + model.b2
    h2 = np.maximum(z2, 0.0)
    p = softmax(h2 @ model.w3 + model.b3)
    return z1, h1, z2, h2, p


def forward_semi(model: SemiHead, features) -> Array:
    """Row-wise cluster probabilities."""
    x = np.asarray(features, dtype=np.float64)
    return _forward_semi_cached(model, x)[4]


def _backward_semi(model: SemiHead, x: Array, cache, dz3: Array) -> dict[str, Array]:
    """Gradients given d(loss)/d(logits3); caller folds softmax into dz3."""
    z1, h1, z2, h2, _ = cache
    dw3 = h2.T @ dz3
    db3 = dz3.sum(axis=0)
    dh2 = dz3 @ model.w3.T
    dz2 = dh2 * (z2 > 0)
    dw2 = h1.T @ dz2
    db2 = dz2.sum(axis=0)
    dh1 = dz2 @ model.w2.T
    dz1 = dh1 * (z1 > 0)
    dw1 = x.T @ dz1
    db1 = dz1.sum(axis=0)
    return {"w1": dw1, "b1": db1, "w2": dw2, "b2": db2, "w3": dw3, "b3": db3}


def _add_grads(a: dict[str, Array], b: dict[str, Array]) -> dict[str, Array]:
    return {k: a[k] + b[k] for k in a}


def semi_loss_on_views(
    model: SemiHead,
    labeled_weak: Array,
    labels: Array,
    unlabeled_weak: Array,
    unlabeled_strong: Array,
    tau: float,
) -> tuple[float, dict[str, Array], dict]:
    """Joint loss and analytic gradients on prepared views.

    Term 1: mean cross-entropy of the labeled weak view against labels.
    Term 2: for unlabeled samples whose weak-view max probability reaches
    tau, cross-entropy of the strong view against the weak argmax,
    averaged over the full unlabeled batch. The weak-view predictions
    enter term 2 only as constants (hard targets and the gate), so no
    gradient flows through them.
    """
    if not 0.0 < tau <= 1.0:
        raise ConfigError(f"tau must be in (0, 1], got {tau}")
    xw = np.asarray(labeled_weak, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64).ravel()
    if xw.shape[0] == 0:
        raise InvalidInputError("labeled batch is empty")
    if y.shape[0] != xw.shape[0]:
        raise ShapeError(f"{y.shape[0]} labels for {xw.shape[0]} labeled rows")
    uw = np.asarray(unlabeled_weak, dtype=np.float64)
    us = np.asarray(unlabeled_strong, dtype=np.float64)
    if uw.shape != us.shape:
        raise ShapeError(f"weak {uw.shape} and strong {us.shape} views disagree")
    k = model.k
    if y.min() < 0 or y.max() >= k:
        raise InvalidInputError(f"labels outside [0, {k})")
    b = xw.shape[0]

    cache_l = _forward_semi_cached(model, xw)
    p_l = cache_l[4]
    eps_rows = np.clip(p_l[np.arange(b), y], 1e-300, None)
    term1 = float(-np.mean(np.log(eps_rows)))
    onehot = np.zeros((b, k))
    onehot[np.arange(b), y] = 1.0
    grads = _backward_semi(model, xw, cache_l, (p_l - onehot) / b)

    n_u = uw.shape[0]
    term2 = 0.0
    n_confident = 0
    if n_u > 0:
        q = forward_semi(model, uw)  # constants: no gradient path below
        conf = q.max(axis=1)
        targets = np.argmax(q, axis=1)
        mask = conf >= tau
        n_confident = int(mask.sum())
        if n_confident > 0:
            cache_s = _forward_semi_cached(model, us)
            p_s = cache_s[4]
            rows = np.clip(p_s[np.arange(n_u), targets], 1e-300, None)
            term2 = float(np.sum(mask * -np.log(rows)) / n_u)
            t_onehot = np.zeros((n_u, k))
            t_onehot[np.arange(n_u), targets] = 1.0
            dz3_u = mask[:, None] * (p_s - t_onehot) / n_u
            grads = _add_grads(grads, _backward_semi(model, us, cache_s, dz3_u))

    loss = term1 + term2
    aux = {"term1": term1, "term2": term2, "n_confident": n_confident, "n_unlabeled": n_u}
    return loss, grads, aux


def semi_loss(
    model: SemiHead,
    labeled: tuple[Array, Array],
    unlabeled: Array,
    tcfg: TransformConfig,
    tau: float,
    rng: np.random.Generator,
) -> tuple[float, dict[str, Array], dict]:
    """Draw the weak/strong views then evaluate :func:`semi_loss_on_views`."""
    lx, ly = labeled
    xw = transform(np.asarray(lx, dtype=np.float64), tcfg, "weak", rng)
    u = np.asarray(unlabeled, dtype=np.float64)
    uw = transform(u, tcfg, "weak", rng)
    us = transform(u, tcfg, "strong", rng)
    return semi_loss_on_views(model, xw, ly, uw, us, tau)


@dataclass
class SemiTrainConfig:
    """Knobs for the boosting stage. unlabeled_ratio is the factor mu: each
    step pairs labeled_batch reliable samples with mu * labeled_batch
    unlabeled ones."""

    labeled_batch: int = 64
    unlabeled_ratio: int = 7
    tau: float = 0.95
    epochs: int = 30
    hidden_width: int = 512
    transform_cfg: TransformConfig | None = None
    optimizer: str = "adaptive-moments"
    learning_rate: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.labeled_batch < 1:
            raise ConfigError(f"labeled_batch must be >= 1, got {self.labeled_batch}")
        if self.unlabeled_ratio < 1:
            raise ConfigError(f"unlabeled_ratio must be >= 1, got {self.unlabeled_ratio}")
        if not 0.0 < self.tau < 1.0:
            raise ConfigError(f"tau must be in (0, 1), got {self.tau}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.hidden_width < 1:
            raise ConfigError(f"hidden_width must be >= 1, got {self.hidden_width}")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be > 0")


@dataclass
class SemiTrainResult:
    model: SemiHead
    labels: Array
    probs: Array
    epoch_losses: list[float]
    reliable_indices: Array


def _resolve_semi_transform(
    cfg: SemiTrainConfig, features: Array
) -> TransformConfig:
    # Identity weak views would make the consistency target trivial, so the
    # default weak noise is a small fraction of per-dimension feature std.
    if cfg.transform_cfg is None:
        std = features.std(axis=0)
        return TransformConfig(
            weak_noise_sigma=0.02 * std,
            strong_noise_sigma=0.1 * std,
            strong_dropout_rate=0.1,
        )
    return cfg.transform_cfg.resolved(features)


def train_semi(
    dataset: EmbeddingDataset, reliable: ReliableSet, cfg: SemiTrainConfig
) -> SemiTrainResult:
    """Train the boosted classifier; the reliable set itself is never mutated."""
    if reliable.starved:
        raise ClusterStarvationError(reliable.starved_clusters)
    if len(reliable) == 0:
        raise InvalidInputError("reliable set is empty")
    features = dataset.features
    n, d = features.shape
    k = reliable.k
    if reliable.indices.max() >= n:
        raise InvalidInputError("reliable indices outside the dataset")
    tcfg = _resolve_semi_transform(cfg, features)

    model = init_semi_head(d, cfg.hidden_width, k, make_rng(cfg.seed, _STREAM_SEMI_INIT))
    opt = OptimizerState(method=cfg.optimizer, learning_rate=cfg.learning_rate)
    gen = make_rng(cfg.seed, _STREAM_SEMI_BATCH)

    rel_idx = reliable.indices
    rel_labels = reliable.labels
    n_rel = len(reliable)
    u_batch = cfg.unlabeled_ratio * cfg.labeled_batch
    steps_per_epoch = max(1, n // u_batch)

    epoch_losses: list[float] = []
    for epoch in range(cfg.epochs):
        losses = []
        for step in range(steps_per_epoch):
            lab = gen.choice(n_rel, size=cfg.labeled_batch, replace=n_rel < cfg.labeled_batch)
            unl = gen.choice(n, size=u_batch, replace=u_batch > n)
            loss, grads, _ = semi_loss(
                model,
                (features[rel_idx[lab]], rel_labels[lab]),
                features[unl],
                tcfg,
                cfg.tau,
                gen,
            )
            if not np.isfinite(loss):
                raise NumericFailureError(f"non-finite loss at epoch {epoch} step {step}")
            optimizer_step(model, grads, opt)
            losses.append(loss)
        epoch_losses.append(float(np.mean(losses)))

    probs = _predict_chunked(model, features)
    labels = np.argmax(probs, axis=1).astype(np.int64)
    return SemiTrainResult(
        model=model,
        labels=labels,
        probs=probs,
        epoch_losses=epoch_losses,
        reliable_indices=rel_idx.copy(),
    )


def _predict_chunked(model: SemiHead, features: Array, chunk: int = 2048) -> Array:
    parts = [
        forward_semi(model, features[s : s + chunk])
        for s in range(0, features.shape[0], chunk)
    ]
    return np.concatenate(parts, axis=0)


def predict_semi(model: SemiHead, dataset: EmbeddingDataset) -> tuple[Array, Array]:
    probs = _predict_chunked(model, dataset.features)
    return np.argmax(probs, axis=1).astype(np.int64), probs


def save_semi_head(model: SemiHead, path) -> None:
    """Checkpoint: magic, version, dims, then parameters as float64."""
    with open(path, "wb") as fh:
        fh.write(_SEMI_HEADER.pack(SEMI_MAGIC, 1, model.d, model.hidden, model.k))
        for p in model.params().values():
            fh.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_semi_head(path) -> SemiHead:
    data = Path(path).read_bytes()
    if len(data) < _SEMI_HEADER.size:
        raise ParseError(path, "byte 0", "file too short for header")
    magic, version, d, hidden, k = _SEMI_HEADER.unpack_from(data, 0)
    if magic != SEMI_MAGIC:
        raise ParseError(path, "byte 0", f"bad magic {magic!r}")
    if version != 1:
        raise ParseError(path, "byte 4", f"unsupported version {version}")
    sizes = [(d, hidden), (hidden,), (hidden, hidden), (hidden,), (hidden, k), (k,)]
    need = _SEMI_HEADER.size + sum(int(np.prod(s)) for s in sizes) * 8
    if len(data) != need:
        raise ParseError(path, f"byte {len(data)}", f"size mismatch, expected {need}")
    pos = _SEMI_HEADER.size
    arrays = []
    for shape in sizes:
        count = int(np.prod(shape))
        arrays.append(
            np.frombuffer(data, dtype="<f8", count=count, offset=pos)
            .reshape(shape)
            .astype(np.float64)
        )
        pos += count * 8
    return SemiHead(*arrays)
