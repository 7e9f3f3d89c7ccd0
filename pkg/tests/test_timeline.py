import numpy as np
import pytest
from hypothesis import given, strategies as st

from weakstrong.timeline import (
    AnnotationList,
    EventList,
    Interval,
    frame_labels,
    intersect,
    merge_positive,
    read_annotations,
    read_events,
    write_annotations,
    write_events,
)


@pytest.mark.parametrize(
    "a, b, expected",
    [((10, 12), (9, 11), 1.0), ((0, 5), (5, 10), 0.0), ((2, 4), (1, 6), 2.0)],
)
def test_intersect(a, b, expected):
    assert intersect(Interval(*a), Interval(*b)) == expected


intervals = st.tuples(st.floats(0, 100), st.floats(0, 50)).map(lambda t: Interval(t[0], t[0] + t[1]))


@given(intervals, intervals)
def test_intersect_symmetric_and_bounded(a, b):
    assert intersect(a, b) == intersect(b, a)
    assert 0.0 <= intersect(a, b) <= min(a.duration(), b.duration()) + 1e-12


def test_interval_rejects_reversed():
    with pytest.raises(ValueError):
        Interval(3.0, 2.0)


def test_merge_positive_adjacent():
    ann = AnnotationList.from_rows([(0, 5, 0), (5, 8, 1), (8, 12, 1), (12, 30, 0)], 30)
    assert merge_positive(ann).pairs() == [(5, 12)]


def test_merge_positive_empty_and_gap():
    ann = AnnotationList.from_rows([(0, 10, 0), (10, 30, 0)], 30)
    assert merge_positive(ann).pairs() == []
    ann = AnnotationList.from_rows([(0, 2, 1), (2, 4, 0), (4, 6, 1)], 6)
    assert merge_positive(ann).pairs() == [(0, 2), (4, 6)]


def test_annotation_list_requires_partition():
    with pytest.raises(ValueError):
        AnnotationList.from_rows([(0, 5, 0), (6, 10, 1)], 10)
    with pytest.raises(ValueError):
        AnnotationList.from_rows([(0, 5, 0), (5, 9, 1)], 10)
    with pytest.raises(ValueError):
        AnnotationList.from_rows([(0, 5, 0), (5, 5, 1), (5, 10, 0)], 10)
    with pytest.raises(ValueError):
        AnnotationList.from_rows([(0, 10, 2)], 10)


def test_event_list_rejects_overlap():
    with pytest.raises(ValueError):
        EventList.from_pairs([(1, 3), (2, 4)], 10)
    with pytest.raises(ValueError):
        EventList.from_pairs([(1, 11)], 10)


def test_frame_labels_examples():
    ev = EventList.from_pairs([(0.10, 0.20)], 0.3)
    assert frame_labels(ev, 0.05).tolist() == [0, 0, 1, 1, 0, 0]
    assert frame_labels(EventList.from_pairs([], 1.0), 0.05).tolist() == [0] * 20
    assert frame_labels(EventList.from_pairs([(0, 0.3)], 0.3), 0.05).tolist() == [1] * 6


@st.composite
def partitions(draw):
    n = draw(st.integers(1, 8))
    cuts = sorted(set(draw(st.lists(st.integers(1, 299), min_size=n - 1, max_size=n - 1))))
    edges = [0.0] + [c / 10 for c in cuts] + [30.0]
    labels = draw(st.lists(st.integers(0, 1), min_size=len(edges) - 1, max_size=len(edges) - 1))
    return AnnotationList.from_rows([(a, b, c) for a, b, c in zip(edges, edges[1:], labels)], 30.0)


@given(partitions())
def test_merge_positive_idempotent(ann):
    merged = merge_positive(ann)
    # re-annotate the merged events on the same boundaries
    again = AnnotationList.from_rows(
        [(a.segment.start, a.segment.end, int(any(intersect(a.segment, e) > 0 for e in merged))) for a in ann],
        ann.duration,
    )
    assert merge_positive(again).pairs() == merged.pairs()


@given(partitions())
def test_frame_labels_of_merge_equals_raw_positive_segments(ann):
    merged = frame_labels(merge_positive(ann), 0.05)
    raw = np.zeros_like(merged)
    for a in ann:
        if a.label:
            raw |= frame_labels(EventList((a.segment,), ann.duration), 0.05)
    assert np.array_equal(merged, raw)


def test_text_round_trip(tmp_path):
    ev = EventList.from_pairs([(1.25, 2.5), (10.123456, 12.0)], 30.0)
    write_events(tmp_path / "a.events", ev)
    assert (tmp_path / "a.events").read_text().splitlines()[0] == "1.250000\t2.500000\t1"
    assert read_events(tmp_path / "a.events", 30.0).pairs() == ev.pairs()
    ann = AnnotationList.from_rows([(0, 7.5, 0), (7.5, 30, 1)], 30.0)
    write_annotations(tmp_path / "a.ann", ann)
    assert read_annotations(tmp_path / "a.ann", 30.0).rows() == ann.rows()
