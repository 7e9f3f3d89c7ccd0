import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from weakstrong.metrics import F1Report, event_f1, segment_f1
from weakstrong.timeline import EventList

from oracles import frame_count_oracle, random_events

GT = EventList.from_pairs([(2, 4), (10, 12), (20, 25)], 30)


def test_segment_identity_and_empty():
    assert segment_f1(GT, GT).f1 == 1.0
    assert segment_f1(EventList.from_pairs([], 30), GT).f1 == 0.0


def test_segment_f1_matches_frame_oracle():
    rng = np.random.default_rng(7)
    for _ in range(200):
        T = float(rng.integers(2, 12))
        pred, gt = random_events(rng, T), random_events(rng, T)
        r = segment_f1(pred, gt, 0.05)
        assert (r.tp, r.fp, r.fn) == frame_count_oracle(pred, gt, 0.05, T)


def test_segment_f1_split_vs_merged():
    merged = EventList.from_pairs([(5, 12)], 30)
    split = EventList.from_pairs([(5, 8), (8, 12)], 30)
    assert segment_f1(merged, GT) == segment_f1(split, GT)


def test_f1_formula_and_degenerate():
    r = F1Report(3, 1, 2)
    p, rec = 3 / 4, 3 / 5
    assert r.f1 == pytest.approx(2 * p * rec / (p + rec))
    assert F1Report(0, 0, 0).f1 == 0.0


def test_event_identity_and_collar():
    assert event_f1(GT, GT).f1 == 1.0
    shifted = EventList.from_pairs([(2.4, 4.3), (10.4, 11.6), (20.4, 25.5)], 30)
    assert event_f1(shifted, GT).f1 == 1.0
    off = EventList.from_pairs([(2.6, 4.0)], 30)
    assert event_f1(off, GT).tp == 0


def test_event_offset_ratio_option():
    gt = EventList.from_pairs([(0, 10)], 30)
    pred = EventList.from_pairs([(0, 13)], 30)
    assert event_f1(pred, gt).tp == 0
    assert event_f1(pred, gt, offset_ratio=0.5).tp == 1


def test_merged_events_give_one_tp_at_most():
    gt = EventList.from_pairs([(2, 4), (4.6, 6)], 30)
    pred = EventList.from_pairs([(2, 6)], 30)
    r = event_f1(pred, gt)
    assert r.tp <= 1 and r.fn >= 1


def optimal_tp(pred, gt, collar=0.5):
    """Maximum one-to-one matching by enumerating all injections."""
    ok = [[abs(p.start - g.start) <= collar and abs(p.end - g.end) <= collar for g in gt] for p in pred]
    best = 0
    for perm in itertools.permutations(range(len(gt)), min(len(pred), len(gt))):
        for chosen in itertools.combinations(range(len(pred)), len(perm)):
            best = max(best, sum(ok[i][j] for i, j in zip(chosen, perm)))
    return best


def test_greedy_matching_equals_optimal_on_small_cases():
    rng = np.random.default_rng(11)
    for _ in range(300):
        gt = random_events(rng, 8.0)
        # noisy copies of gt plus random events keep matches plentiful
        jitter = [(max(0.0, e.start + rng.uniform(-0.6, 0.6)), e.end + rng.uniform(-0.6, 0.6)) for e in gt]
        jitter = [(s, min(8.0, max(e, s + 0.05))) for s, e in sorted(jitter)]
        try:
            pred = EventList.from_pairs(jitter, 8.0)
        except ValueError:
            pred = random_events(rng, 8.0)
        assert event_f1(pred, gt).tp == optimal_tp(pred, gt)


events = st.lists(st.integers(0, 599), min_size=0, max_size=8, unique=True).map(
    lambda xs: EventList.from_pairs(np.array(sorted(xs)[: len(xs) // 2 * 2]).reshape(-1, 2) / 20.0, 30.0)
)


@given(events, events)
def test_swap_preserves_f1(a, b):
    for metric in (segment_f1, event_f1):
        ab, ba = metric(a, b), metric(b, a)
        assert ab.f1 == pytest.approx(ba.f1)
        assert ab.precision == pytest.approx(ba.recall)
        assert 0.0 <= ab.f1 <= 1.0
