"""Downstream models trained on session annotations and scored on a test set.

Both models consume the same window-level training pairs: every embedding
window that lies wholly inside an annotated segment is paired with that
segment's weak label.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .loop import SessionResult
from .metrics import SEGMENT_FRAME, F1Report, pooled, segment_f1
from .protonet import ProtoModel, init_from_pretraining, window_segment_labels
from .synthgen import Recording
from .timeline import EventList


class DegenerateTraining(ValueError):
    """Training data lacks one of the two classes."""


@dataclass(frozen=True)
class TrainConfig:
    hidden: int = 32
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 20
    batch_size: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.hidden < 1 or self.batch_size < 1:
            raise ValueError("hidden and batch_size must be >= 1")


def build_training_set(session: SessionResult, data: Sequence[Recording]) -> tuple[np.ndarray, np.ndarray]:
    """Window embeddings and labels for every window inside an annotated segment."""
    xs, ys = [], []
    dim = None
    for rec in data:
        dim = rec.stream.dim
        ann = session.annotations.get(rec.id)
        if ann is None:
            continue
        labels = window_segment_labels(ann, rec.stream)
        keep = labels >= 0
        xs.append(rec.stream.vectors[keep])
        ys.append(labels[keep].astype(np.int64))
    if not xs:
        return np.zeros((0, dim or 0)), np.zeros(0, dtype=np.int64)
    return np.concatenate(xs), np.concatenate(ys)


# -- Adam ---------------------------------------------------------------------


class Adam:
    """Adam with bias-corrected first and second moments."""

    def __init__(self, params: dict[str, np.ndarray], lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for k, g in grads.items():
            self.m[k] = self.beta1 * self.m[k] + (1 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1 - self.beta2) * g * g
            m_hat = self.m[k] / bc1
            v_hat = self.v[k] / bc2
            params[k] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


# -- two-layer MLP --------------------------------------------------------------


@dataclass(eq=False)
class MlpModel:
    W1: np.ndarray  # (H, K)
    b1: np.ndarray  # (H,)
    W2: np.ndarray  # (2, H)
    b2: np.ndarray  # (2,)

    @classmethod
    def init(cls, K: int, H: int, rng: np.random.Generator) -> "MlpModel":
        # He init for the ReLU layer, Glorot-style for the output layer
        W1 = rng.standard_normal((H, K)) * np.sqrt(2.0 / K)
        W2 = rng.standard_normal((2, H)) * np.sqrt(1.0 / H)
        return cls(W1, np.zeros(H), W2, np.zeros(2))

    @property
    def H(self) -> int:
        return self.W1.shape[0]

    def params(self) -> dict[str, np.ndarray]:
        return {"W1": self.W1, "b1": self.b1, "W2": self.W2, "b2": self.b2}

    def logits(self, X: np.ndarray) -> np.ndarray:
        h = np.maximum(X @ self.W1.T + self.b1, 0.0)
        return h @ self.W2.T + self.b2

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        z = self.logits(np.atleast_2d(X))
        z = z - z.max(axis=1, keepdims=True)
        p = np.exp(z)
        return p[:, 1] / p.sum(axis=1)


def loss_and_grads(params: dict[str, np.ndarray], X: np.ndarray, y: np.ndarray) -> tuple[float, dict[str, np.ndarray]]:
    """Mean softmax cross-entropy and its gradient w.r.t. every parameter."""
    W1, b1, W2, b2 = params["W1"], params["b1"], params["W2"], params["b2"]
    n = len(X)
    pre = X @ W1.T + b1
    h = np.maximum(pre, 0.0)
    z = h @ W2.T + b2
    z = z - z.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    loss = -float(np.mean(logp[np.arange(n), y]))

    dz = np.exp(logp)
    dz[np.arange(n), y] -= 1.0
    dz /= n
    dh = dz @ W2
    dpre = dh * (pre > 0)
    grads = {
        "W2": dz.T @ h,
        "b2": dz.sum(axis=0),
        "W1": dpre.T @ X,
        "b1": dpre.sum(axis=0),
    }
    return loss, grads


def train_mlp(X: np.ndarray, y: np.ndarray, cfg: TrainConfig = TrainConfig(), history: list | None = None) -> MlpModel:
    """Fit the MLP with Adam over seeded mini-batches.

    If ``history`` is given, the mean training loss of each epoch is appended.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(X) == 0 or len(np.unique(y)) < 2:
        raise DegenerateTraining("MLP training needs examples of both classes")
    rng = np.random.default_rng(cfg.seed)
    model = MlpModel.init(X.shape[1], cfg.hidden, rng)
    params = model.params()
    opt = Adam(params, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps)
    for _ in range(cfg.epochs):
        order = rng.permutation(len(X))
        total = 0.0
        for start in range(0, len(X), cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            loss, grads = loss_and_grads(params, X[idx], y[idx])
            opt.step(params, grads)
            total += loss * len(idx)
        if history is not None:
            history.append(total / len(X))
    return model


def train_protonet_eval(X: np.ndarray, y: np.ndarray) -> ProtoModel:
    """Class-mean prototypes of the training pairs (no pre-training)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if not (np.any(y == 1) and np.any(y == 0)):
        raise DegenerateTraining("ProtoNet needs examples of both classes")
    return init_from_pretraining(X[y == 1], X[y == 0])


def windows_to_events(positive: np.ndarray, timestamps: np.ndarray, window_len: float, duration: float) -> EventList:
    """Union of the spans ``[t - L/2, t + L/2]`` of positive windows."""
    pairs: list[list[float]] = []
    half = window_len / 2
    for t in np.asarray(timestamps)[np.asarray(positive, dtype=bool)]:
        s, e = max(0.0, t - half), min(duration, t + half)
        if pairs and s <= pairs[-1][1]:
            pairs[-1][1] = max(pairs[-1][1], e)
        else:
            pairs.append([s, e])
    return EventList.from_pairs(pairs, duration)


def predict_events(model, rec: Recording, threshold: float = 0.5) -> EventList:
    proba = np.atleast_1d(model.predict_proba(rec.stream.vectors))
    return windows_to_events(proba >= threshold, rec.stream.timestamps, rec.stream.window_len, rec.duration)


def evaluate_model(model, test: Sequence[Recording], frame: float = SEGMENT_FRAME, threshold: float = 0.5) -> F1Report:
    """Segment F1 of window-level predictions, pooled over the test recordings."""
    return pooled(segment_f1(predict_events(model, rec, threshold), rec.ground_truth, frame) for rec in test)
