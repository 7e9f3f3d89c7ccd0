import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import special_ortho_group

from weakstrong.protonet import (
    ProtoModel,
    init_from_pretraining,
    predict_prob,
    probability_curve,
    read_model,
    update,
    write_model,
)
from weakstrong.synthgen import DatasetSpec, EmbeddingStream, directions, generate_recording
from weakstrong.timeline import AnnotationList


def test_init_is_class_mean():
    m = init_from_pretraining(np.array([[1.0, 0.0], [3.0, 0.0]]), np.array([[0.0, 2.0]]))
    assert np.array_equal(m.proto_pos, [2.0, 0.0])
    assert np.array_equal(m.proto_neg, [0.0, 2.0])
    assert (m.count_pos, m.count_neg) == (2, 1)


def test_init_single_vector_and_empty():
    m = init_from_pretraining(np.array([[1.0, 2.0]]), np.array([[3.0, 4.0]]))
    assert np.array_equal(m.proto_pos, [1.0, 2.0])
    with pytest.raises(ValueError):
        init_from_pretraining(np.zeros((0, 2)), np.array([[1.0, 1.0]]))


def test_predict_prob_examples():
    m = ProtoModel(np.array([1.0, 0.0]), np.array([-1.0, 0.0]), 1, 1)
    assert predict_prob(m, np.array([0.0, 5.0])) == pytest.approx(0.5)
    assert predict_prob(m, m.proto_pos) > 0.5
    # ||e - neg||^2 - ||e - pos||^2 = 4 - 0
    assert predict_prob(m, np.array([1.0, 0.0])) == pytest.approx(1 / (1 + math.exp(-4)))
    assert predict_prob(m, np.array([1.0, 0.0])) == pytest.approx(0.982, abs=5e-4)


def test_predict_prob_rotation_invariant():
    rng = np.random.default_rng(0)
    for _ in range(20):
        R = special_ortho_group.rvs(5, random_state=rng)
        pos, neg, e = rng.standard_normal((3, 5))
        a = predict_prob(ProtoModel(pos, neg, 1, 1), e)
        b = predict_prob(ProtoModel(R @ pos, R @ neg, 1, 1), R @ e)
        assert a == pytest.approx(b, abs=1e-12)


@settings(max_examples=50)
@given(st.lists(st.floats(-1, 1), min_size=15, max_size=15))
def test_curve_strictly_inside_unit_interval(xs):
    # |logit| stays below 36 here; beyond that float64 sigmoid rounds to exactly 1
    x = np.array(xs)
    m = ProtoModel(x[:3], x[3:6], 1, 1)
    s = EmbeddingStream(x[6:15].reshape(3, 3), 1.0, 0.25)
    v = probability_curve(m, s).values
    assert np.all((v > 0) & (v < 1))


def test_curve_length_and_constant():
    spec = DatasetSpec(seed=2)
    rec = generate_recording(spec, 0)
    m = ProtoModel(np.ones(16), np.zeros(16), 1, 1)
    c = probability_curve(m, rec.stream)
    assert len(c) == len(rec.stream) == 117
    assert np.array_equal(c.timestamps, rec.stream.timestamps)
    flat = probability_curve(m, EmbeddingStream(np.tile(m.proto_pos, (10, 1)), 1.0, 0.25))
    assert np.all(flat.values == flat.values[0])


def _stream(n, dim=2, seed=0):
    return EmbeddingStream(np.random.default_rng(seed).standard_normal((n, dim)), 1.0, 0.25)


def test_update_no_windows_inside():
    # a 0.75 s segment cannot contain a 1 s window
    s = _stream(9)  # windows span up to 3.0 s
    ann = AnnotationList.from_rows([(0, 0.75, 1), (0.75, 1.5, 0), (1.5, 2.25, 1), (2.25, 3.0, 0)], 3.0)
    m = ProtoModel(np.zeros(2), np.ones(2), 1, 1)
    m2 = update(m, ann, s)
    assert np.array_equal(m2.proto_pos, m.proto_pos) and m2.count_pos == 1
    assert np.array_equal(m2.proto_neg, m.proto_neg) and m2.count_neg == 1


def test_update_single_positive_window():
    v = np.array([[4.0, 2.0]])
    s = EmbeddingStream(v, 1.0, 0.25)
    ann = AnnotationList.from_rows([(0, 1.0, 1)], 1.0)
    m = update(ProtoModel(np.zeros(2), np.ones(2), 1, 1), ann, s)
    assert np.allclose(m.proto_pos, [2.0, 1.0])
    assert m.count_pos == 2 and m.count_neg == 1


def test_update_matches_from_scratch_mean():
    rng = np.random.default_rng(3)
    init_pos, init_neg = rng.standard_normal((4, 3)), rng.standard_normal((6, 3))
    m = init_from_pretraining(init_pos, init_neg)
    all_pos, all_neg = [init_pos], [init_neg]
    for k in range(5):
        s = _stream(37, dim=3, seed=10 + k)  # windows cover [0, 10]
        ann = AnnotationList.from_rows([(0, 3.3, 0), (3.3, 6.1, 1), (6.1, 10.0, k % 2)], 10.0)
        m = update(m, ann, s)
        lo, hi = s.window_bounds()
        for a in ann:
            inside = (lo >= a.segment.start) & (hi <= a.segment.end)
            (all_pos if a.label else all_neg).append(s.vectors[inside])
    ref_pos, ref_neg = np.concatenate(all_pos).mean(axis=0), np.concatenate(all_neg).mean(axis=0)
    assert np.allclose(m.proto_pos, ref_pos, rtol=1e-9, atol=1e-10)
    assert np.allclose(m.proto_neg, ref_neg, rtol=1e-9, atol=1e-10)
    assert m.count_pos == len(np.concatenate(all_pos))


def test_adaptivity_over_seeds():
    """One round of correct labels moves predictions towards the true window labels."""
    from weakstrong.annotator import AnnotatorConfig, annotate
    from weakstrong.cpd import orc_queries
    from weakstrong.synthgen import overlap_fraction, pretraining_set

    before, after = [], []
    for seed in range(20):
        spec = DatasetSpec(seed=seed, class_id=f"adapt{seed}", separation=2.0)
        rec = generate_recording(spec, 0)
        m0 = init_from_pretraining(*pretraining_set(spec, 32, 32))
        truth = (overlap_fraction(rec.stream.timestamps, rec.ground_truth, spec.window_len) > 0.5).astype(float)
        ann = annotate(orc_queries(rec.ground_truth), rec.ground_truth, AnnotatorConfig(), np.random.default_rng(0))
        m1 = update(m0, ann, rec.stream)
        before.append(np.mean(np.abs(probability_curve(m0, rec.stream).values - truth)))
        after.append(np.mean(np.abs(probability_curve(m1, rec.stream).values - truth)))
    assert np.mean(after) < np.mean(before)
    assert sum(a < b for a, b in zip(after, before)) > len(before) / 2


def test_model_round_trip(tmp_path):
    m = ProtoModel(np.arange(4.0), -np.arange(4.0), 3, 7)
    write_model(tmp_path / "model.proto", m)
    raw = (tmp_path / "model.proto").read_bytes()
    assert raw[:4] == b"PRO1" and len(raw) == 4 + 4 + 16 + 8 * 8
    back = read_model(tmp_path / "model.proto")
    assert np.array_equal(back.proto_pos, m.proto_pos) and np.array_equal(back.proto_neg, m.proto_neg)
    assert (back.count_pos, back.count_neg) == (3, 7)
