"""Segment-based and event-based F1 for sound event annotations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .timeline import EventList, frame_labels

SEGMENT_FRAME = 0.05
EVENT_COLLAR = 0.5


@dataclass(frozen=True)
class F1Report:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: "F1Report") -> "F1Report":
        return F1Report(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


def pooled(reports: Iterable[F1Report]) -> F1Report:
    """Micro-average: sum the counts over recordings."""
    total = F1Report(0, 0, 0)
    for r in reports:
        total = total + r
    return total


def _check_durations(pred: EventList, gt: EventList):
    if abs(pred.duration - gt.duration) > 1e-9:
        raise ValueError(f"duration mismatch: {pred.duration} vs {gt.duration}")


def segment_f1(pred: EventList, gt: EventList, frame: float = SEGMENT_FRAME) -> F1Report:
    _check_durations(pred, gt)
    p = frame_labels(pred, frame).astype(bool)
    g = frame_labels(gt, frame).astype(bool)
    return F1Report(int(np.sum(p & g)), int(np.sum(p & ~g)), int(np.sum(~p & g)))


def event_f1(
    pred: EventList,
    gt: EventList,
    collar: float = EVENT_COLLAR,
    offset_ratio: float | None = None,
) -> F1Report:
    """Greedy one-to-one onset/offset matching within ``collar`` seconds.

    With ``offset_ratio`` set, the offset tolerance becomes
    ``max(collar, offset_ratio * gt_length)``.
    """
    _check_durations(pred, gt)
    gt_events = sorted(gt, key=lambda e: e.start)
    matched = [False] * len(gt_events)
    tp = 0
    for p in sorted(pred, key=lambda e: e.start):
        for j, g in enumerate(gt_events):
            if matched[j]:
                continue
            off_tol = collar if offset_ratio is None else max(collar, offset_ratio * g.duration())
            if abs(p.start - g.start) <= collar and abs(p.end - g.end) <= off_tol:
                matched[j] = True
                tp += 1
                break
    return F1Report(tp, len(pred) - tp, len(gt_events) - tp)
