"""The annotation session: visit every recording once, query, annotate, adapt."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import cpd
from .annotator import AnnotatorConfig, annotate
from .cpd import Strategy
from .protonet import ProtoModel, init_from_pretraining, update, window_segment_labels, write_model
from .synthgen import Dataset, Recording, pretraining_set
from .timeline import AnnotationList, write_annotations

_PERMUTATION_STREAM = 0
_ANNOTATOR_STREAM = 1


@dataclass(frozen=True)
class LoopConfig:
    strategy: Strategy
    B: int
    annotator: AnnotatorConfig = field(default_factory=AnnotatorConfig)
    seed: int = 0
    n_pretrain_pos: int = 32
    n_pretrain_neg: int = 32

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if self.B < 1:
            raise ValueError("B must be >= 1")
        if self.strategy in (Strategy.ACPD, Strategy.FCPD) and self.B < 2:
            raise ValueError(f"{self.strategy.value} needs B >= 2")

    def to_meta(self) -> str:
        return (
            f"strategy={self.strategy.value}\nB={self.B}\ngamma={self.annotator.gamma!r}\n"
            f"beta={self.annotator.beta!r}\nannotator_seed={self.annotator.seed}\nseed={self.seed}\n"
            f"n_pretrain_pos={self.n_pretrain_pos}\nn_pretrain_neg={self.n_pretrain_neg}\n"
        )


@dataclass(eq=False)
class SessionResult:
    annotations: dict[str, AnnotationList]
    visit_order: list[str]
    model: ProtoModel | None = None
    assigned_windows: int = 0

    def save(self, directory: str | Path, cfg: LoopConfig) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        meta = cfg.to_meta() + "visit_order=" + ",".join(self.visit_order) + "\n"
        (directory / "session.meta").write_text(meta)
        for rid in sorted(self.annotations):
            write_annotations(directory / f"{rid}.ann", self.annotations[rid])
        if self.model is not None:
            write_model(directory / "model.proto", self.model)
        return directory


def annotator_rng(seed: int, recording_id: str) -> np.random.Generator:
    return np.random.default_rng([seed, _ANNOTATOR_STREAM, zlib.crc32(recording_id.encode())])


def build_queries(rec: Recording, strategy: Strategy, B: int, model: ProtoModel | None = None) -> cpd.QuerySet:
    T = rec.duration
    if strategy is Strategy.ACPD:
        return cpd.acpd_queries(model, rec.stream, B, T)
    if strategy is Strategy.FCPD:
        return cpd.fcpd_queries(rec.stream, B, T)
    if strategy is Strategy.FIX:
        return cpd.fix_queries(T, B)
    return cpd.orc_queries(rec.ground_truth, B)


def initial_model(data: Dataset, cfg: LoopConfig) -> ProtoModel:
    pos, neg = pretraining_set(data.spec, cfg.n_pretrain_pos, cfg.n_pretrain_neg)
    return init_from_pretraining(pos, neg)


def run_session(data: Dataset | Sequence[Recording], cfg: LoopConfig, model: ProtoModel | None = None) -> SessionResult:
    """Annotate every recording once, in a seeded random order.

    For A-CPD the prototype model starts from ``model`` (or from the dataset's
    pre-training set) and is updated after each recording, before the next
    recording's queries are built.
    """
    recordings = list(data)
    if not recordings:
        raise ValueError("empty dataset")
    if cfg.strategy is Strategy.ACPD and model is None:
        if not isinstance(data, Dataset):
            raise ValueError("A-CPD needs an initial model or a Dataset with a spec to pre-train from")
        model = initial_model(data, cfg)

    order = np.random.default_rng([cfg.seed, _PERMUTATION_STREAM]).permutation(len(recordings))
    unlabeled = {rec.id for rec in recordings}
    labeled: set[str] = set()
    annotations: dict[str, AnnotationList] = {}
    visit_order = []
    assigned = 0
    for k in order:
        rec = recordings[k]
        queries = build_queries(rec, cfg.strategy, cfg.B, model)
        ann = annotate(queries, rec.ground_truth, cfg.annotator, annotator_rng(cfg.annotator.seed, rec.id))
        annotations[rec.id] = ann
        if cfg.strategy is Strategy.ACPD:
            assigned += int(np.sum(window_segment_labels(ann, rec.stream) >= 0))
            model = update(model, ann, rec.stream)
        unlabeled.remove(rec.id)
        labeled.add(rec.id)
        visit_order.append(rec.id)
    assert not unlabeled and len(labeled) == len(recordings)
    return SessionResult(
        annotations,
        visit_order,
        model if cfg.strategy is Strategy.ACPD else None,
        assigned,
    )
