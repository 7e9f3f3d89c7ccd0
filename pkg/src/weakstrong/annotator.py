"""Simulated weak-label annotator.

A query is labeled present when it covers at least ``gamma`` of some event's
length; each answer is then flipped with probability ``beta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cpd import QuerySet
from .timeline import Annotation, AnnotationList, EventList, intersect


@dataclass(frozen=True)
class AnnotatorConfig:
    gamma: float = 0.5
    beta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if not 0 <= self.beta <= 1:
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")


def true_label(query, gt: EventList, gamma: float) -> int:
    for ev in gt:
        length = ev.duration()
        if length > 0 and intersect(ev, query) / length >= gamma:
            return 1
    return 0


def annotate(q: QuerySet, gt: EventList, cfg: AnnotatorConfig, rng: np.random.Generator) -> AnnotationList:
    # one uniform per query whatever beta is, so noise settings stay stream-aligned
    draws = rng.random(len(q))
    out = []
    for query, u in zip(q, draws):
        label = true_label(query, gt, cfg.gamma)
        if u < cfg.beta:
            label = 1 - label
        out.append(Annotation(query, label))
    return AnnotationList(tuple(out), q.duration)
