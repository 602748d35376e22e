"""Multi-head self-training driven by per-batch pseudo-labels.

Each epoch partitions the dataset into large batches. For every batch,
cluster probabilities on a weakly transformed view produce per-cluster
confident sets, prototypes, and pseudo-labels; each classification head
then takes gradient steps on strongly transformed views of its own
pseudo-labeled samples. After the last epoch every head is scored on a
full-dataset pass and the head with the lowest loss is selected.

Reproducibility contract: head h draws from its own counter-based stream
keyed by (seed, head-tag, h), and shared draws (partition order, weak
views) are keyed by epoch/batch only, so training with extra heads and
discarding them leaves the surviving head's parameters bit-identical.
"""

from __future__ import annotations

import dataclasses
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import EmbeddingDataset, TransformConfig, transform
from .errors import ConfigError, NumericFailureError
from .head import (
    ClsHead,
    OptimizerState,
    ds_ce_loss,
    alt_losses,
    entropy_regularizer,
    forward,
    head_loss_and_grads,
    init_head,
    optimizer_step,
)
from .numeric import Array, make_rng
from .pseudolabel import PseudoLabelConfig, pseudo_label

_STREAM_HEAD = 1
_STREAM_PARTITION = 2
_STREAM_WEAK = 3
_STREAM_EVAL = 4

_LOSS_VARIANTS = ("ds_ce", "ce", "tce")


def thread_count() -> int:
    """Worker cap from SPICE_THREADS (default 1). Results never depend on it."""
    raw = os.environ.get("SPICE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class SelfTrainConfig:
    """Knobs for the self-training loop.

    batch_size is the pseudo-labeling batch M (default min(N, max(100*k, 1000))),
    train_batch the gradient minibatch, infer_chunk the forward chunk used
    when scoring batches (None = whole batch at once).
    """

    pseudo_cfg: PseudoLabelConfig
    transform_cfg: TransformConfig = field(default_factory=TransformConfig)
    batch_size: int | None = None
    infer_chunk: int | None = None
    train_batch: int = 128
    epochs: int = 30
    num_heads: int = 10
    loss_variant: str = "ds_ce"
    tce_temperature: float = 0.2
    entropy_weight: float = 0.0
    optimizer: str = "adaptive-moments"
    learning_rate: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.num_heads < 1:
            raise ConfigError(f"num_heads must be >= 1, got {self.num_heads}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.loss_variant not in _LOSS_VARIANTS:
            raise ConfigError(
                f"loss_variant must be one of {_LOSS_VARIANTS}, got {self.loss_variant!r}"
            )
        if self.train_batch < 1:
            raise ConfigError(f"train_batch must be >= 1, got {self.train_batch}")
        if self.entropy_weight < 0:
            raise ConfigError(f"entropy_weight must be >= 0, got {self.entropy_weight}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")

    def resolve_batch_size(self, n: int) -> int:
        if self.batch_size is None:
            return min(n, max(100 * self.pseudo_cfg.k, 1000))
        if not 1 <= self.batch_size <= n:
            raise ConfigError(f"batch_size={self.batch_size} outside [1, N={n}]")
        if self.train_batch > self.batch_size:
            raise ConfigError(
                f"train_batch={self.train_batch} exceeds batch_size={self.batch_size}"
            )
        return self.batch_size


@dataclass
class HeadPool:
    """Trained heads plus the evaluation outcome used to pick one."""

    heads: list[ClsHead]
    per_head_loss: list[float] = field(default_factory=list)
    selected: int | None = None

    def best(self) -> ClsHead:
        if self.selected is None:
            raise ConfigError("head pool has not been evaluated")
        return self.heads[self.selected]


@dataclass
class SelfTrainResult:
    pool: HeadPool
    labels: Array
    probs: Array
    epoch_losses: list[list[float]]
    degeneracy_events: list[dict]


def _forward_chunked(head: ClsHead, x: Array, chunk: int | None) -> Array:
    if chunk is None or chunk >= x.shape[0]:
        return forward(head, x)
    parts = [forward(head, x[s : s + chunk]) for s in range(0, x.shape[0], chunk)]
    return np.concatenate(parts, axis=0)


def head_loss(
    head: ClsHead,
    x: Array,
    labels: Array,
    variant: str = "ds_ce",
    temperature: float = 0.2,
    entropy_weight: float = 0.0,
    chunk: int | None = None,
) -> float:
    """Loss only, no gradients; used for head scoring."""
    probs = _forward_chunked(head, x, chunk)
    if variant == "ds_ce":
        loss = ds_ce_loss(probs, labels)
    else:
        loss = alt_losses(probs, labels, variant, temperature)
    if entropy_weight > 0:
        loss += entropy_weight * entropy_regularizer(probs)
    return float(loss)


def _train_head_on_batch(
    head: ClsHead,
    opt: OptimizerState,
    gen: np.random.Generator,
    batch_features: Array,
    weak_view: Array,
    cfg: SelfTrainConfig,
    tcfg: TransformConfig,
    where: str,
) -> tuple[list[float], list[int]]:
    """One pseudo-label + gradient pass for a single head. Returns
    (minibatch losses, degenerate cluster ids)."""
    probs = _forward_chunked(head, weak_view, cfg.infer_chunk)
    batch = pseudo_label(batch_features, probs, cfg.pseudo_cfg)
    if len(batch) == 0:
        return [], batch.degenerate_clusters
    strong = transform(batch_features[batch.sample_indices], tcfg, "strong", gen)
    order = gen.permutation(len(batch))
    n_mb = max(1, len(batch) // cfg.train_batch)
    losses = []
    for chunk in np.array_split(order, n_mb):
        loss, grads = head_loss_and_grads(
            head,
            strong[chunk],
            batch.labels[chunk],
            variant=cfg.loss_variant,
            temperature=cfg.tce_temperature,
            entropy_weight=cfg.entropy_weight,
        )
        if not np.isfinite(loss):
            raise NumericFailureError(f"non-finite loss at {where}")
        optimizer_step(head, grads, opt)
        losses.append(float(loss))
    return losses, batch.degenerate_clusters


def train_self(dataset: EmbeddingDataset, cfg: SelfTrainConfig) -> SelfTrainResult:
    features = dataset.features
    n, d = features.shape
    k = cfg.pseudo_cfg.k
    m = cfg.resolve_batch_size(n)
    tcfg = cfg.transform_cfg.resolved(features)

    heads: list[ClsHead] = []
    opts: list[OptimizerState] = []
    gens: list[np.random.Generator] = []
    for h in range(cfg.num_heads):
        gen = make_rng(cfg.seed, _STREAM_HEAD, h)
        heads.append(init_head(d, k, gen))
        opts.append(OptimizerState(method=cfg.optimizer, learning_rate=cfg.learning_rate))
        gens.append(gen)

    epoch_losses: list[list[float]] = []
    degeneracy_events: list[dict] = []
    prev_epoch_degenerate: set[int] = set()
    warned_persistent = False
    workers = thread_count()

    for epoch in range(cfg.epochs):
        perm = make_rng(cfg.seed, _STREAM_PARTITION, epoch).permutation(n)
        batches = np.array_split(perm, max(1, n // m))
        per_head_epoch = [[] for _ in range(cfg.num_heads)]
        epoch_degenerate: set[int] = set()
        for b, idx in enumerate(batches):
            bf = features[idx]
            weak = transform(bf, tcfg, "weak", make_rng(cfg.seed, _STREAM_WEAK, epoch, b))

            def run(h, _bf=bf, _weak=weak, _e=epoch, _b=b):
                return _train_head_on_batch(
                    heads[h], opts[h], gens[h], _bf, _weak, cfg, tcfg,
                    where=f"epoch {_e} batch {_b} head {h}",
                )

            if workers > 1 and cfg.num_heads > 1:
                with ThreadPoolExecutor(max_workers=workers) as ex:
                    outcomes = list(ex.map(run, range(cfg.num_heads)))
            else:
                outcomes = [run(h) for h in range(cfg.num_heads)]
            for h, (losses, degenerate) in enumerate(outcomes):
                per_head_epoch[h].extend(losses)
                if degenerate:
                    epoch_degenerate.update(degenerate)
                    degeneracy_events.append(
                        {"epoch": epoch, "batch": b, "head": h, "clusters": degenerate}
                    )
        epoch_losses.append(
            [float(np.mean(L)) if L else float("nan") for L in per_head_epoch]
        )
        persistent = epoch_degenerate & prev_epoch_degenerate
        if persistent and cfg.entropy_weight == 0.0 and not warned_persistent:
            warnings.warn(
                f"clusters {sorted(persistent)} produced no assignable samples in "
                "consecutive epochs; consider entropy_weight > 0",
                stacklevel=2,
            )
            warned_persistent = True
        prev_epoch_degenerate = epoch_degenerate

    pool = HeadPool(heads=heads)
    evaluate_heads(dataset, pool, cfg)
    labels, probs = predict(pool.best(), dataset, chunk=cfg.infer_chunk)
    return SelfTrainResult(
        pool=pool,
        labels=labels,
        probs=probs,
        epoch_losses=epoch_losses,
        degeneracy_events=degeneracy_events,
    )


def evaluate_heads(
    dataset: EmbeddingDataset, pool: HeadPool, cfg: SelfTrainConfig
) -> tuple[list[float], int]:
    """Score every head on one full-dataset pseudo-label pass; pick the
    lowest loss (ties -> lowest index).

    The weak and strong views are drawn once and shared across heads so
    identical heads receive identical losses. The per-cluster counts are
    re-derived from the full dataset size.
    """
    features = dataset.features
    tcfg = cfg.transform_cfg.resolved(features)
    weak = transform(features, tcfg, "weak", make_rng(cfg.seed, _STREAM_EVAL, 0))
    strong = transform(features, tcfg, "strong", make_rng(cfg.seed, _STREAM_EVAL, 1))
    eval_pcfg = dataclasses.replace(cfg.pseudo_cfg, n_per_cluster=None)
    losses = []
    for head in pool.heads:
        probs = _forward_chunked(head, weak, cfg.infer_chunk)
        batch = pseudo_label(features, probs, eval_pcfg)
        if len(batch) == 0:
            losses.append(float("inf"))
            continue
        losses.append(
            head_loss(
                head,
                strong[batch.sample_indices],
                batch.labels,
                variant=cfg.loss_variant,
                temperature=cfg.tce_temperature,
                entropy_weight=cfg.entropy_weight,
                chunk=cfg.infer_chunk,
            )
        )
    selected = int(np.argmin(losses))
    pool.per_head_loss = losses
    pool.selected = selected
    return losses, selected


def predict(
    head: ClsHead, dataset: EmbeddingDataset, chunk: int | None = None
) -> tuple[Array, Array]:
    """Cluster assignments on untransformed features. Ties -> lowest id."""
    probs = _forward_chunked(head, dataset.features, chunk)
    return np.argmax(probs, axis=1).astype(np.int64), probs
