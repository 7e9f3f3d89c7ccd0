"""Two-prototype presence model with running-average updates."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .synthgen import EmbeddingStream
from .timeline import BOUNDARY_TOL, AnnotationList

PROTO_MAGIC = b"PRO1"


@dataclass(frozen=True, eq=False)
class ProtoModel:
    proto_pos: np.ndarray
    proto_neg: np.ndarray
    count_pos: float
    count_neg: float

    def __post_init__(self):
        if self.count_pos < 1 or self.count_neg < 1:
            raise ValueError("both prototypes need at least one supporting vector")
        object.__setattr__(self, "proto_pos", np.asarray(self.proto_pos, dtype=np.float64))
        object.__setattr__(self, "proto_neg", np.asarray(self.proto_neg, dtype=np.float64))
        if self.proto_pos.shape != self.proto_neg.shape or self.proto_pos.ndim != 1:
            raise ValueError("prototypes must be 1-D vectors of equal dimension")

    @property
    def dim(self) -> int:
        return self.proto_pos.shape[0]

    def predict_logit(self, e: np.ndarray) -> np.ndarray:
        e = np.asarray(e, dtype=np.float64)
        d_neg = np.sum((e - self.proto_neg) ** 2, axis=-1)
        d_pos = np.sum((e - self.proto_pos) ** 2, axis=-1)
        return d_neg - d_pos

    def predict_proba(self, e: np.ndarray) -> np.ndarray:
        return _sigmoid(self.predict_logit(e))


@dataclass(frozen=True, eq=False)
class ProbabilityCurve:
    values: np.ndarray
    timestamps: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


def _sigmoid(x):
    # split by sign to avoid overflow in exp
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def init_from_pretraining(pos: np.ndarray, neg: np.ndarray) -> ProtoModel:
    """Prototypes are the class means of the pre-training vectors."""
    pos = np.atleast_2d(np.asarray(pos, dtype=np.float64))
    neg = np.atleast_2d(np.asarray(neg, dtype=np.float64))
    if pos.size == 0 or neg.size == 0:
        raise ValueError("init_from_pretraining needs non-empty positive and negative sets")
    return ProtoModel(pos.mean(axis=0), neg.mean(axis=0), len(pos), len(neg))


def predict_prob(m: ProtoModel, e: np.ndarray) -> float:
    """Two-class softmax over negative squared distances to the prototypes."""
    return float(m.predict_proba(np.asarray(e, dtype=np.float64)))


def probability_curve(m: ProtoModel, s: EmbeddingStream) -> ProbabilityCurve:
    return ProbabilityCurve(m.predict_proba(s.vectors), s.timestamps.copy())


def window_segment_labels(ann: AnnotationList, s: EmbeddingStream) -> np.ndarray:
    """Label of the annotated segment containing each window, or -1 if the window straddles a boundary."""
    lo, hi = s.window_bounds()
    labels = np.full(len(s), -1, dtype=np.int8)
    for a in ann:
        inside = (lo >= a.segment.start - BOUNDARY_TOL) & (hi <= a.segment.end + BOUNDARY_TOL)
        labels[inside] = a.label
    return labels


def update(m: ProtoModel, ann: AnnotationList, s: EmbeddingStream) -> ProtoModel:
    """Fold windows lying wholly inside an annotated segment into the running class means."""
    labels = window_segment_labels(ann, s)
    pos = s.vectors[labels == 1]
    neg = s.vectors[labels == 0]
    proto_pos, count_pos = m.proto_pos, m.count_pos
    proto_neg, count_neg = m.proto_neg, m.count_neg
    if len(pos):
        proto_pos = (count_pos * proto_pos + pos.sum(axis=0)) / (count_pos + len(pos))
        count_pos += len(pos)
    if len(neg):
        proto_neg = (count_neg * proto_neg + neg.sum(axis=0)) / (count_neg + len(neg))
        count_neg += len(neg)
    return ProtoModel(proto_pos, proto_neg, count_pos, count_neg)


def write_model(path: str | Path, m: ProtoModel) -> None:
    header = PROTO_MAGIC + struct.pack("<Idd", m.dim, float(m.count_pos), float(m.count_neg))
    body = np.concatenate([m.proto_pos, m.proto_neg]).astype("<f8").tobytes()
    Path(path).write_bytes(header + body)


def read_model(path: str | Path) -> ProtoModel:
    data = Path(path).read_bytes()
    if data[:4] != PROTO_MAGIC:
        raise ValueError(f"{path}: bad magic {data[:4]!r}")
    K, count_pos, count_neg = struct.unpack("<Idd", data[4:24])
    values = np.frombuffer(data, dtype="<f8", offset=24)
    if values.size != 2 * K:
        raise ValueError(f"{path}: expected {2 * K} values, found {values.size}")
    return ProtoModel(values[:K].copy(), values[K:].copy(), count_pos, count_neg)
