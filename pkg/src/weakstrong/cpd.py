"""Change-point curves, prominence peaks and query construction.

Four query strategies produce a :class:`QuerySet` partition of ``[0, T]``:

* ``ACPD``: peaks of ``|p[i+1] - p[i-1]|`` on the prototype model's
  probability curve.
* ``FCPD``: peaks of the cosine distance between neighbouring embeddings.
* ``FIX``: ``B`` equal-length segments.
* ``ORC``: the alternating absence/presence segments of the ground truth.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .protonet import ProbabilityCurve, ProtoModel, probability_curve
from .synthgen import EmbeddingStream
from .timeline import BOUNDARY_TOL, EventList, Interval, check_partition, format_rows


class Strategy(str, Enum):
    ACPD = "ACPD"
    FCPD = "FCPD"
    FIX = "FIX"
    ORC = "ORC"


class UnsupportedBudget(ValueError):
    """Raised when ORC is asked for fewer queries than the recording needs."""

    def __init__(self, budget: int, b_suff: int):
        super().__init__(f"ORC needs B >= {b_suff} queries, got B={budget}")
        self.budget = budget
        self.b_suff = b_suff


@dataclass(frozen=True, eq=False)
class DistanceCurve:
    values: np.ndarray
    timestamps: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        ts = np.asarray(self.timestamps, dtype=np.float64)
        if values.shape != ts.shape:
            raise ValueError("values and timestamps differ in length")
        if np.any(values < -1e-12):
            raise ValueError("distance curve must be non-negative")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("timestamps must be strictly increasing")
        object.__setattr__(self, "values", np.clip(values, 0.0, None))
        object.__setattr__(self, "timestamps", ts)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class QuerySet:
    queries: tuple[Interval, ...]
    strategy: Strategy
    duration: float

    def __post_init__(self):
        object.__setattr__(self, "queries", tuple(self.queries))
        check_partition(self.queries, self.duration)

    def __len__(self) -> int:
        return len(self.queries)

    def __iter__(self):
        return iter(self.queries)

    def boundaries(self) -> list[float]:
        return [q.start for q in self.queries[1:]]

    def to_text(self) -> str:
        return format_rows(((q.start, q.end) for q in self.queries), with_label=False)


def _neighbour_offset(alpha: float, hop: float) -> int:
    delta = int(round(alpha / hop))
    if delta != 1:
        raise ValueError(f"alpha must equal the hop ({hop}), got {alpha}")
    return delta


def acpd_curve(p: ProbabilityCurve, alpha: float, hop: float | None = None) -> DistanceCurve:
    """Absolute difference between the previous and next probability."""
    values = np.asarray(p.values, dtype=np.float64)
    ts = np.asarray(p.timestamps, dtype=np.float64)
    if len(values) < 3:
        raise ValueError("probability curve needs at least 3 samples")
    hop = float(ts[1] - ts[0]) if hop is None else hop
    d = _neighbour_offset(alpha, hop)
    return DistanceCurve(np.abs(values[2 * d:] - values[:-2 * d]), ts[d:-d])


def fcpd_curve(s: EmbeddingStream, alpha: float) -> DistanceCurve:
    """Cosine distance between the previous and next embedding."""
    if len(s) < 3:
        raise ValueError("embedding stream needs at least 3 windows")
    d = _neighbour_offset(alpha, s.hop)
    norms = np.linalg.norm(s.vectors, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero-norm embedding: cosine distance undefined")
    prev, nxt = s.vectors[:-2 * d], s.vectors[2 * d:]
    cos = np.sum(prev * nxt, axis=1) / (norms[:-2 * d] * norms[2 * d:])
    return DistanceCurve(1.0 - np.clip(cos, -1.0, 1.0), s.timestamps[d:-d])


def find_peaks(c: DistanceCurve | np.ndarray) -> list[tuple[int, float]]:
    """Interior local maxima and their prominence, in index order.

    A peak is a sample (or the leftmost sample of a flat run) whose left
    neighbour is strictly lower and whose run is followed by a strictly lower
    value. The first and last samples are never peaks. Prominence is the peak
    height above the higher of the two nearest local minima, found by
    descending left and right; the curve endpoints act as minima.

    Returns ``(index, prominence)`` pairs; use the curve timestamps for times.
    """
    g = np.asarray(c.values if isinstance(c, DistanceCurve) else c, dtype=np.float64)
    n = len(g)
    peaks = []
    i = 1
    while i < n - 1:
        if g[i] > g[i - 1]:
            j = i
            while j + 1 < n and g[j + 1] == g[i]:
                j += 1
            if j + 1 < n and g[j + 1] < g[i]:
                left = i
                while left > 0 and g[left - 1] <= g[left]:
                    left -= 1
                right = j
                while right < n - 1 and g[right + 1] <= g[right]:
                    right += 1
                peaks.append((i, float(g[i] - max(g[left], g[right]))))
            i = j + 1
        else:
            i += 1
    return peaks


def pad_boundaries(boundaries: list[float], duration: float, n_boundaries: int) -> list[float]:
    """Bisect the longest segment (earliest on ties) until there are ``n_boundaries`` cut points."""
    cuts = sorted(boundaries)
    while len(cuts) < n_boundaries:
        edges = [0.0] + cuts + [duration]
        lengths = np.diff(edges)
        k = int(np.argmax(lengths))  # argmax returns the first maximum
        bisect.insort(cuts, (edges[k] + edges[k + 1]) / 2)
    return cuts


def queries_from_curve(c: DistanceCurve, B: int, duration: float, strategy: Strategy) -> QuerySet:
    """Cut at the ``B - 1`` most prominent peaks (earlier time wins ties)."""
    if B < 2:
        raise ValueError("change-point strategies need B >= 2")
    peaks = find_peaks(c)
    ranked = sorted(peaks, key=lambda pk: (-pk[1], pk[0]))[: B - 1]
    cuts = [float(c.timestamps[i]) for i, _ in ranked]
    cuts = [t for t in cuts if BOUNDARY_TOL < t < duration - BOUNDARY_TOL]
    cuts = pad_boundaries(cuts, duration, B - 1)
    edges = [0.0] + cuts + [duration]
    return QuerySet(tuple(Interval(a, b) for a, b in zip(edges, edges[1:])), strategy, duration)


def acpd_queries(m: ProtoModel, s: EmbeddingStream, B: int, duration: float) -> QuerySet:
    curve = acpd_curve(probability_curve(m, s), alpha=s.hop, hop=s.hop)
    return queries_from_curve(curve, B, duration, Strategy.ACPD)


def fcpd_queries(s: EmbeddingStream, B: int, duration: float) -> QuerySet:
    return queries_from_curve(fcpd_curve(s, alpha=s.hop), B, duration, Strategy.FCPD)


def fix_queries(T: float, B: int) -> QuerySet:
    if B < 1:
        raise ValueError("FIX needs B >= 1")
    d = T / B
    edges = [i * d for i in range(B)] + [T]
    return QuerySet(tuple(Interval(a, b) for a, b in zip(edges, edges[1:])), Strategy.FIX, T)


def orc_queries(gt: EventList, B: int | None = None) -> QuerySet:
    """Alternating absence/presence segments; ``UnsupportedBudget`` if ``B`` is too small.

    Events touching a recording edge drop the empty absence segment there.
    A budget larger than needed still yields only the sufficient segments.
    """
    edges = [0.0]
    for ev in gt:
        if ev.start - edges[-1] > BOUNDARY_TOL:
            edges.append(ev.start)
        edges.append(ev.end)
    if gt.duration - edges[-1] > BOUNDARY_TOL:
        edges.append(gt.duration)
    else:
        edges[-1] = gt.duration
    qs = QuerySet(tuple(Interval(a, b) for a, b in zip(edges, edges[1:])), Strategy.ORC, gt.duration)
    if B is not None and B < len(qs):
        raise UnsupportedBudget(B, len(qs))
    return qs


def b_suff(gt: EventList) -> int:
    """Number of maximal constant-label segments of a recording."""
    return len(orc_queries(gt))
