"""Light-weight classification head (D -> D -> k MLP with softmax output),
the double-softmax cross-entropy loss and its analytic gradients, loss
ablation variants, an entropy regularizer over batch cluster usage, and
SGD-momentum / adaptive-moment optimizers.

The double-softmax loss re-applies softmax to an already-softmaxed
prediction before taking cross-entropy. Because probabilities lie in
[0, 1], the re-softmaxed components are confined to
[1/(k-1+e), e/(k-1+e)], so the loss stays strictly positive even for
perfect one-hot predictions, which pushes the model toward confident
outputs.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    InvalidInputError,
    InvalidLabelError,
    ParseError,
    ShapeError,
)
from .numeric import Array, softmax, softmax_vjp

HEAD_MAGIC = b"SPCH"
_HEAD_HEADER = struct.Struct("<4sIII")  # magic, version, d, k

LOSS_VARIANTS = ("ds_ce", "ce", "tce")


@dataclass
class ClsHead:
    """Two fully-connected layers D -> D -> k, ReLU hidden, softmax output."""

    w1: Array
    b1: Array
    w2: Array
    b2: Array

    @property
    def d(self) -> int:
        return self.w1.shape[0]

    @property
    def k(self) -> int:
        return self.w2.shape[1]

    def params(self) -> dict[str, Array]:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2}

    def copy(self) -> "ClsHead":
        return ClsHead(self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy())


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, shape) -> Array:
    s = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-s, s, size=shape)


def init_head(d: int, k: int, rng: np.random.Generator) -> ClsHead:
    """Glorot-uniform weights, zero biases."""
    if d < 2 or k < 2:
        raise ConfigError(f"init_head needs d >= 2 and k >= 2, got d={d}, k={k}")
    return ClsHead(
        w1=glorot_uniform(rng, d, d, (d, d)),
        b1=np.zeros(d),
        w2=glorot_uniform(rng, d, k, (d, k)),
        b2=np.zeros(k),
    )


def _forward_cached(head: ClsHead, x: Array) -> tuple[Array, Array, Array]:
    if x.shape[1] != head.d:
        raise ShapeError(f"feature width {x.shape[1]} != head dimension {head.d}")
    z1 = x @ head.w1 + head.b1
    h = np.maximum(z1, 0.0)
    z2 = h @ head.w2 + head.b2
    return z1, h, softmax(z2)


def forward(head: ClsHead, features) -> Array:
    """Row-wise cluster probabilities for a batch of features."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    return _forward_cached(head, x)[2]


def _check_prob_rows(probs) -> Array:
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim == 1:
        p = p[None, :]
    if np.any(p < 0) or np.any(np.abs(p.sum(axis=1) - 1.0) > 1e-8):
        raise InvalidInputError("rows must be probability vectors")
    return p


def _check_labels(labels, m: int, k: int) -> Array:
    y = np.asarray(labels, dtype=np.int64).ravel()
    if y.shape[0] != m:
        raise ShapeError(f"got {y.shape[0]} labels for {m} rows")
    if y.size and (y.min() < 0 or y.max() >= k):
        raise InvalidLabelError(f"label outside [0, {k})")
    return y


def ds_ce_loss(probs, labels) -> float:
    """Mean cross-entropy of softmax-ed probability rows against labels."""
    p = _check_prob_rows(probs)
    y = _check_labels(labels, p.shape[0], p.shape[1])
    p2 = softmax(p)
    return float(-np.mean(np.log(p2[np.arange(p.shape[0]), y])))


def alt_losses(probs, labels, variant: str, temperature: float = 0.2) -> float:
    """Ablation losses: 'ce' on the probabilities directly, or 'tce' =
    cross-entropy after re-softmaxing at the given temperature (tce at
    temperature 1 coincides with the double-softmax loss)."""
    p = _check_prob_rows(probs)
    y = _check_labels(labels, p.shape[0], p.shape[1])
    idx = np.arange(p.shape[0])
    if variant == "ce":
        return float(-np.mean(np.log(np.maximum(p[idx, y], 1e-300))))
    if variant == "tce":
        if temperature <= 0:
            raise ConfigError("temperature must be positive")
        p2 = softmax(p / temperature)
        return float(-np.mean(np.log(p2[idx, y])))
    raise ConfigError(f"unknown loss variant {variant!r}")


def entropy_regularizer(probs) -> float:
    """Negative entropy of the batch-mean prediction: sum_c q_c ln q_c.

    Minimized at -ln k when cluster usage is uniform; 0 when the batch
    mean is one-hot. Adding it with a positive weight discourages empty
    clusters.
    """
    p = _check_prob_rows(probs)
    q = p.mean(axis=0)
    nz = q > 0
    return float(np.sum(q[nz] * np.log(q[nz])))


def _grad_wrt_probs(p: Array, y: Array, variant: str, temperature: float) -> tuple[float, Array, bool]:
    """Loss value, gradient w.r.t. the probability rows, and whether that
    gradient still needs the first-softmax pullback (False for 'ce', whose
    pullback composes to the classic p - onehot form directly)."""
    m, k = p.shape
    idx = np.arange(m)
    onehot = np.zeros_like(p)
    onehot[idx, y] = 1.0
    if variant == "ce":
        loss = float(-np.mean(np.log(np.maximum(p[idx, y], 1e-300))))
        return loss, onehot, False  # caller uses (p - onehot)/m on logits
    if variant == "ds_ce":
        t = 1.0
    elif variant == "tce":
        t = temperature
        if t <= 0:
            raise ConfigError("temperature must be positive")
    else:
        raise ConfigError(f"unknown loss variant {variant!r}")
    p2 = softmax(p / t)
    loss = float(-np.mean(np.log(p2[idx, y])))
    grad_p = (p2 - onehot) / (m * t)
    return loss, grad_p, True


def head_loss_and_grads(
    head: ClsHead,
    features,
    labels,
    variant: str = "ds_ce",
    temperature: float = 0.2,
    entropy_weight: float = 0.0,
) -> tuple[float, dict[str, Array]]:
    """Mean loss over the batch plus analytic gradients for every parameter.

    The gradient chains through both softmax layers for the double-softmax
    variants: d loss / d probs, pulled back through the first softmax's
    Jacobian, then through the MLP.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    z1, h, p = _forward_cached(head, x)
    m, k = p.shape
    y = _check_labels(labels, m, k)

    loss, grad_p, needs_pullback = _grad_wrt_probs(p, y, variant, temperature)
    if needs_pullback:
        dz2 = softmax_vjp(p, grad_p)
    else:
        onehot = grad_p
        dz2 = (p - onehot) / m

    if entropy_weight != 0.0:
        q = p.mean(axis=0)
        loss += entropy_weight * float(np.sum(q * np.log(q)))
        dreg_dp = (np.log(q) + 1.0)[None, :] / m
        dz2 = dz2 + entropy_weight * softmax_vjp(p, np.broadcast_to(dreg_dp, p.shape))

    dw2 = h.T @ dz2
    db2 = dz2.sum(axis=0)
    dh = dz2 @ head.w2.T
    dz1 = dh * (z1 > 0)
    dw1 = x.T @ dz1
    db1 = dz1.sum(axis=0)
    return loss, {"w1": dw1, "b1": db1, "w2": dw2, "b2": db2}


def ds_ce_backward(head: ClsHead, features, labels) -> dict[str, Array]:
    """Analytic gradients of the mean double-softmax loss."""
    return head_loss_and_grads(head, features, labels, variant="ds_ce")[1]


@dataclass
class OptimizerState:
    """Per-parameter accumulator slots for one model's parameters."""

    method: str = "adaptive-moments"
    learning_rate: float = 1e-3
    momentum: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    slots: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in ("sgd-momentum", "adaptive-moments"):
            raise ConfigError(f"unknown optimizer {self.method!r}")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")

    def _slot(self, name: str, like: Array, key: str) -> Array:
        per_param = self.slots.setdefault(name, {})
        if key not in per_param:
            per_param[key] = np.zeros_like(like)
        return per_param[key]


def optimizer_step(model, grads: dict[str, Array], state: OptimizerState) -> None:
    """Update model parameters in place per the configured rule."""
    params = model.params() if hasattr(model, "params") else model
    state.step += 1
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ShapeError(f"gradient shape {g.shape} != parameter shape {p.shape} ({name})")
        if state.method == "sgd-momentum":
            v = state._slot(name, p, "v")
            v *= state.momentum
            v += g
            p -= state.learning_rate * v
        else:
            m = state._slot(name, p, "m")
            v = state._slot(name, p, "v")
            m *= state.beta1
            m += (1.0 - state.beta1) * g
            v *= state.beta2
            v += (1.0 - state.beta2) * g * g
            mhat = m / (1.0 - state.beta1**state.step)
            vhat = v / (1.0 - state.beta2**state.step)
            p -= state.learning_rate * mhat / (np.sqrt(vhat) + state.eps)


def save_head(head: ClsHead, path) -> None:
    """Checkpoint: magic, version, dims, then parameters as float64."""
    with open(path, "wb") as fh:
        fh.write(_HEAD_HEADER.pack(HEAD_MAGIC, 1, head.d, head.k))
        for p in head.params().values():
            fh.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_head(path) -> ClsHead:
    data = Path(path).read_bytes()
    if len(data) < _HEAD_HEADER.size:
        raise ParseError(path, "byte 0", "file too short for header")
    magic, version, d, k = _HEAD_HEADER.unpack_from(data, 0)
    if magic != HEAD_MAGIC:
        raise ParseError(path, "byte 0", f"bad magic {magic!r}")
    if version != 1:
        raise ParseError(path, "byte 4", f"unsupported version {version}")
    sizes = [(d, d), (d,), (d, k), (k,)]
    need = _HEAD_HEADER.size + sum(int(np.prod(s)) for s in sizes) * 8
    if len(data) != need:
        raise ParseError(path, f"byte {len(data)}", f"size mismatch, expected {need}")
    pos = _HEAD_HEADER.size
    arrays = []
    for shape in sizes:
        count = int(np.prod(shape))
        arrays.append(
            np.frombuffer(data, dtype="<f8", count=count, offset=pos)
            .reshape(shape)
            .astype(np.float64)
        )
        pos += count * 8
    return ClsHead(*arrays)
