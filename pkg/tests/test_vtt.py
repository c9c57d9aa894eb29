import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bibliome.corpus import Label
from bibliome.features import COOCCUR, WORD, WordStat
from bibliome.vtt import (
    CONFIDENCE_CAP,
    BandCutoffs,
    TermWeight,
    VttModel,
    classify,
    classify_batch,
    classify_stems,
    confidence,
    rank,
    score,
    term_weight,
)

from oracles import vtt_oracle

unit = st.floats(0, 1, allow_nan=False)
# class probabilities are document-count ratios
prob = st.builds(lambda k, n: k / n, st.integers(0, 500), st.integers(1, 500)).filter(lambda x: x <= 1)


def _model(weights, lambda0=1.0, beta=15.0, kind=WORD):
    w = {f: TermWeight(f, c, s) for f, (c, s) in weights.items()}
    return VttModel(w, lambda0, beta, kind, tuple(weights) if kind == WORD else ())


def test_term_weight_examples():
    w = term_weight(0.76, 0.12)
    assert w.cos_alpha == pytest.approx(0.9878, abs=1e-3)
    assert w.sin_alpha == pytest.approx(0.1560, abs=1e-3)
    assert (term_weight(0.3, 0).cos_alpha, term_weight(0.3, 0).sin_alpha) == (1.0, 0.0)
    d = term_weight(0.4, 0.4)
    assert d.cos_alpha == pytest.approx(math.sqrt(2) / 2) and d.sin_alpha == pytest.approx(math.sqrt(2) / 2)
    with pytest.raises(ValueError):
        term_weight(0, 0)


@given(unit, unit)
def test_weights_on_unit_circle(p_tp, p_tn):
    if p_tp == 0 and p_tn == 0:
        return
    w = term_weight(p_tp, p_tn)
    assert abs(w.cos_alpha**2 + w.sin_alpha**2 - 1) <= 1e-12


def test_score_examples():
    m = _model({"a": (1.0, 0.0), "b": (0.6, 0.8), "c": (0.0, 1.0)})
    p, n = score(["a", "b"], m)
    assert p == pytest.approx(1.6) and n == pytest.approx(0.8)
    assert score(["zzz"], m) == (0.0, 0.0)
    assert score(["a"], m)[1] == 0.0


def test_presence_counts_once():
    m = _model({"a": (0.6, 0.8)})
    assert score(["a", "a", "a"], m) == pytest.approx((0.6, 0.8))
    freq = VttModel(m.weights, 1, 15, WORD, ("a",), presence=False)
    assert score(["a", "a"], freq) == pytest.approx((1.2, 1.6))


def test_thresholds():
    m = _model({}, 1, 15)
    assert m.threshold(15) == 1
    assert m.threshold(0) == 2


@given(st.floats(0, 10), st.floats(1, 100))
def test_threshold_is_lambda0_at_beta(lambda0, beta):
    m = _model({}, lambda0, beta)
    assert m.threshold(beta) == lambda0


def test_boundary_inclusive():
    d = classify(2.0, 1.0, 0, _model({}, 1, 15))
    assert d.label is Label.POSITIVE and d.margin == 0 and d.threshold == 2
    assert d.confidence == 0 and d.band == "low"


def test_confidence_examples():
    assert confidence(4.0, 2.0)[:2] == (1.0, "high")
    assert confidence(2.0, 2.0)[:2] == (0.0, "low")
    assert BandCutoffs().band(0.3) == "medium"
    assert BandCutoffs().band(0.05) == "low"


def test_band_edges_exact():
    b = BandCutoffs()
    assert b.band(0.1) == "low"
    assert b.band(np.nextafter(0.1, 1)) == "medium"
    assert b.band(0.5) == "high"
    assert b.band(np.nextafter(0.5, 0)) == "medium"
    assert b.band(None) == "low"


def test_degenerate_decisions():
    m = _model({}, 1, 15)
    none = classify(0.0, 0.0, 3, m)
    assert none.label is Label.NEGATIVE and none.confidence == 0.0 and none.band == "low"
    assert "no_evidence" in none.flags and none.margin < 0
    inf = classify(1.5, 0.0, 0, m)
    assert inf.label is Label.POSITIVE and inf.confidence == CONFIDENCE_CAP and inf.band == "high"
    zero_t = classify(1.0, 1.0, 30, _model({}, 0.0, 15))  # T = 0 + (15 - 30)/15 = -1
    assert zero_t.threshold == -1 and zero_t.label is Label.POSITIVE
    t0 = classify(1.0, 1.0, 15, _model({}, 0.0, 15))
    assert t0.threshold == 0 and t0.confidence is None and t0.band == "low"


def test_model_validation():
    with pytest.raises(ValueError):
        _model({}, 1, 0.5)
    with pytest.raises(ValueError):
        _model({}, -1, 15)
    with pytest.raises(ValueError):
        VttModel({}, 1, 15, "trigram")


def test_rank_ordering():
    m = _model({}, 1, 15)
    ds = {
        "p1": classify(2.5, 1.0, 0, m),  # margin 0.5
        "p2": classify(4.0, 1.0, 0, m),  # margin 2.0
        "n1": classify(1.0, 1.0, 0, m),  # margin -1
    }
    pos, neg, scores = rank(ds)
    assert pos == ["p2", "p1"] and neg == ["n1"]
    assert scores["p1"] > scores["n1"]
    tie = {i: classify(3.0, 1.0, 0, m) for i in ("b", "a", "c")}
    assert rank(tie)[0] == ["a", "b", "c"]


def test_persistence_round_trip(tmp_path):
    stats = {("a", "b"): WordStat("x", 0.5, 0.1), ("a", "c"): WordStat("y", 0.0, 0.3)}
    m = VttModel.from_stats(stats, 1.5, 9, COOCCUR, vocabulary=("a", "b", "c"))
    path = tmp_path / "m.json"
    m.save(path)
    back = VttModel.load(path)
    assert back == m
    assert classify_stems(["a", "b"], 2, back) == classify_stems(["a", "b"], 2, m)


@given(
    st.dictionaries(st.sampled_from("abcdefghij"), st.tuples(prob, prob).filter(lambda t: t != (0, 0)), max_size=10),
    st.lists(st.sampled_from("abcdefghijkl"), max_size=12),
    st.integers(0, 40),
    st.floats(0, 10),
    st.floats(1, 50),
)
def test_classify_matches_oracle(weights, doc, np_count, lambda0, beta):
    model = VttModel.from_stats({f: WordStat(f, a, b) for f, (a, b) in weights.items()}, lambda0, beta, WORD)
    d = classify_stems(doc, np_count, model)
    label, p, n, t = vtt_oracle(doc, weights, np_count, lambda0, beta)
    assert d.label.value == label
    assert d.p_sum == pytest.approx(p, abs=1e-8) and d.n_sum == pytest.approx(n, abs=1e-8)
    assert d.threshold == pytest.approx(t, abs=1e-12)


@given(
    st.lists(st.tuples(st.floats(0, 5), st.floats(0, 5), st.integers(0, 30)), min_size=1, max_size=10),
    st.lists(st.floats(0, 10), min_size=1, max_size=4),
    st.lists(st.floats(1, 50), min_size=1, max_size=4),
)
def test_batch_agrees_with_scalar(docs, lambdas, betas):
    p, n, c = (np.array(x) for x in zip(*docs))
    batch = classify_batch(p, n, c, lambdas, betas)
    for i, l0 in enumerate(lambdas):
        for j, b in enumerate(betas):
            m = _model({}, l0, b)
            for k in range(len(docs)):
                assert batch[i, j, k] == (classify(float(p[k]), float(n[k]), int(c[k]), m).label is Label.POSITIVE)
