"""Interval algebra and the label data model.

Times are real seconds. Ground-truth strong labels are held in an
:class:`EventList`; weak labels given to a partition of the recording are
held in an :class:`AnnotationList`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

# Boundaries of a partition are shared exactly; this only absorbs float noise.
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class Interval:
    start: float
    end: float

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise ValueError(f"non-finite interval ({self.start}, {self.end})")
        if self.start < 0:
            raise ValueError(f"interval starts before 0: {self.start}")
        if self.end < self.start:
            raise ValueError(f"interval end {self.end} precedes start {self.start}")

    def duration(self) -> float:
        return self.end - self.start


def intersect(a: Interval, b: Interval) -> float:
    """Length of the overlap of two intervals (0.0 when disjoint or touching)."""
    return max(0.0, min(a.end, b.end) - max(a.start, b.start))


def check_partition(segments: Sequence[Interval], duration: float) -> None:
    """Raise ``ValueError`` unless ``segments`` tile ``[0, duration]`` in order."""
    if not segments:
        raise ValueError("empty partition")
    if abs(segments[0].start) > BOUNDARY_TOL:
        raise ValueError(f"partition starts at {segments[0].start}, not 0")
    if abs(segments[-1].end - duration) > BOUNDARY_TOL:
        raise ValueError(f"partition ends at {segments[-1].end}, not {duration}")
    for prev, cur in zip(segments, segments[1:]):
        if abs(cur.start - prev.end) > BOUNDARY_TOL:
            raise ValueError(f"gap or overlap between {prev} and {cur}")
    for seg in segments:
        if seg.duration() <= 0:
            raise ValueError(f"zero-length segment {seg}")


@dataclass(frozen=True)
class EventList:
    """Sorted, pairwise non-overlapping events inside ``[0, duration]``."""

    events: tuple[Interval, ...]
    duration: float

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        for ev in self.events:
            if ev.end > self.duration + BOUNDARY_TOL:
                raise ValueError(f"event {ev} exceeds recording length {self.duration}")
        for prev, cur in zip(self.events, self.events[1:]):
            if cur.start < prev.end - BOUNDARY_TOL:
                raise ValueError(f"events overlap or are unsorted: {prev}, {cur}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]], duration: float) -> "EventList":
        return cls(tuple(Interval(float(s), float(e)) for s, e in pairs), float(duration))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def pairs(self) -> list[tuple[float, float]]:
        return [(ev.start, ev.end) for ev in self.events]

    def total_duration(self) -> float:
        return sum(ev.duration() for ev in self.events)


@dataclass(frozen=True)
class Annotation:
    segment: Interval
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")


@dataclass(frozen=True)
class AnnotationList:
    annotations: tuple[Annotation, ...]
    duration: float

    def __post_init__(self):
        object.__setattr__(self, "annotations", tuple(self.annotations))
        check_partition([a.segment for a in self.annotations], self.duration)

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[float, float, int]], duration: float) -> "AnnotationList":
        return cls(
            tuple(Annotation(Interval(float(s), float(e)), int(c)) for s, e, c in rows),
            float(duration),
        )

    def __len__(self) -> int:
        return len(self.annotations)

    def __iter__(self):
        return iter(self.annotations)

    def labels(self) -> list[int]:
        return [a.label for a in self.annotations]

    def rows(self) -> list[tuple[float, float, int]]:
        return [(a.segment.start, a.segment.end, a.label) for a in self.annotations]


def merge_positive(ann: AnnotationList) -> EventList:
    """Derive strong labels: each maximal run of adjacent positive segments is one event."""
    merged: list[list[float]] = []
    prev_positive = False
    for a in ann:
        if a.label == 1:
            if prev_positive and abs(a.segment.start - merged[-1][1]) <= BOUNDARY_TOL:
                merged[-1][1] = a.segment.end
            else:
                merged.append([a.segment.start, a.segment.end])
        prev_positive = a.label == 1
    return EventList.from_pairs(merged, ann.duration)


def n_frames(duration: float, frame: float) -> int:
    return int(math.ceil(duration / frame - BOUNDARY_TOL))


def frame_labels(ev: EventList, frame: float) -> np.ndarray:
    """Rasterize events onto frames ``[i*frame, (i+1)*frame)``.

    A frame is 1 when it overlaps any event by a positive amount.
    """
    if frame <= 0:
        raise ValueError("frame must be positive")
    n = n_frames(ev.duration, frame)
    starts = np.arange(n) * frame
    ends = starts + frame
    out = np.zeros(n, dtype=np.uint8)
    for e in ev:
        overlap = np.minimum(ends, e.end) - np.maximum(starts, e.start)
        out[overlap > BOUNDARY_TOL] = 1
    return out


# -- text format: start<TAB>end<TAB>label, 6 fractional digits ---------------


def format_rows(rows: Iterable[Sequence[float]], with_label: bool = True) -> str:
    lines = []
    for row in rows:
        s, e = row[0], row[1]
        if with_label:
            lines.append(f"{s:.6f}\t{e:.6f}\t{int(row[2])}")
        else:
            lines.append(f"{s:.6f}\t{e:.6f}")
    return "".join(line + "\n" for line in lines)


def parse_rows(text: str) -> list[tuple[float, ...]]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split("\t")
        try:
            if len(fields) == 3:
                rows.append((float(fields[0]), float(fields[1]), int(fields[2])))
            elif len(fields) == 2:
                rows.append((float(fields[0]), float(fields[1])))
            else:
                raise ValueError(f"expected 2 or 3 fields, got {len(fields)}")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return rows


def write_events(path: str | Path, ev: EventList) -> None:
    Path(path).write_text(format_rows((s, e, 1) for s, e in ev.pairs()))


def read_events(path: str | Path, duration: float) -> EventList:
    return EventList.from_pairs(((r[0], r[1]) for r in parse_rows(Path(path).read_text())), duration)


def write_annotations(path: str | Path, ann: AnnotationList) -> None:
    Path(path).write_text(format_rows(ann.rows()))


def read_annotations(path: str | Path, duration: float) -> AnnotationList:
    return AnnotationList.from_rows(parse_rows(Path(path).read_text()), duration)
