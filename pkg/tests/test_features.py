import pytest
from hypothesis import given, strategies as st

from bibliome.corpus import Label
from bibliome.features import (
    BIGRAM_PLUS,
    COOCCUR,
    WORD,
    LexiconRecognizer,
    MentionTable,
    WordStat,
    adjacent_pairs,
    bigrams_plus,
    cooccur_pairs,
    count_mentions,
    document_features,
    filter_document,
    read_feature_tsv,
    select_top_words,
    word_class_probs,
    write_feature_tsv,
    write_s_histogram,
)

from oracles import pairs_oracle

P, N = Label.POSITIVE, Label.NEGATIVE

# Reference word statistics: stem -> (p_tp, p_tn, S).
TOY_WEIGHTS_WORDS = {
    "interact": (0.76, 0.12, 0.64),
    "bind": (0.63, 0.14, 0.49),
    "domain": (0.52, 0.08, 0.44),
    "complex": (0.46, 0.15, 0.31),
    "proteom": (0.01, 0.29, 0.28),
    "with": (0.90, 0.65, 0.25),
    "yeast": (0.28, 0.04, 0.24),
    "two-hybrid": (0.23, 0.00, 0.23),
    "protein": (0.86, 0.64, 0.22),
}


def _table4_corpus():
    """100 + 100 documents whose presence counts reproduce the reference rows."""
    docs = [[] for _ in range(200)]
    for w, (tp, tn, _) in TOY_WEIGHTS_WORDS.items():
        for i in range(round(tp * 100)):
            docs[i].append(w)
        for i in range(round(tn * 100)):
            docs[100 + i].append(w)
    return docs, [P] * 100 + [N] * 100


def test_table4_probabilities():
    docs, labels = _table4_corpus()
    stats = word_class_probs(docs, labels)
    for w, (tp, tn, s) in TOY_WEIGHTS_WORDS.items():
        assert stats[w].p_tp == pytest.approx(tp, abs=1e-12)
        assert stats[w].p_tn == pytest.approx(tn, abs=1e-12)
        assert stats[w].s == pytest.approx(s, abs=0.005)


def test_table4_top3():
    stats = {w: WordStat(w, tp, tn) for w, (tp, tn, _) in TOY_WEIGHTS_WORDS.items()}
    assert list(select_top_words(stats, 3)) == ["interact", "bind", "domain"]


def test_two_doc_corpus():
    stats = word_class_probs([["w", "x"], ["x"]], [P, N])
    assert (stats["w"].p_tp, stats["w"].p_tn, stats["w"].s) == (1.0, 0.0, 1.0)
    assert (stats["x"].p_tp, stats["x"].p_tn, stats["x"].s) == (1.0, 1.0, 0.0)


def test_presence_not_frequency():
    stats = word_class_probs([["w", "w", "w"], ["z"]], [P, N])
    assert stats["w"].p_tp == 1.0


def test_unlabeled_ignored_and_classes_required():
    stats = word_class_probs([["a"], ["b"], ["c"]], [P, N, Label.UNLABELED])
    assert set(stats) == {"a", "b"}
    with pytest.raises(ValueError):
        word_class_probs([["a"]], [P])


def test_top_words_ties_and_k():
    stats = {w: WordStat(w, 0.5, 0.1) for w in "dcba"}
    fs = select_top_words(stats, 2)
    assert list(fs) == ["a", "b"] and not fs.short
    assert select_top_words(stats, 10).short
    assert fs.rank("b") == 2
    with pytest.raises(ValueError):
        select_top_words(stats, 0)


def test_filter_document():
    assert filter_document(list("axbxa"), {"a", "b"}) == ["a", "b", "a"]
    assert filter_document(["x"], {"a"}) == []
    assert filter_document(["a", "b"], {"a", "b"}) == ["a", "b"]


def test_bigram_examples():
    assert adjacent_pairs(["with", "interact", "protein"]) == [("with", "interact"), ("interact", "protein")]
    assert adjacent_pairs(["solo"]) == []


def test_bigrams_after_filtering():
    # "x" sits between a and b in the text but is not a feature
    stats = bigrams_plus([["a", "x", "b"], ["b", "a"]], [P, N], {"a", "b"})
    assert stats[("a", "b")].p_tp == 1.0 and stats[("a", "b")].p_tn == 0.0
    assert stats[("b", "a")].p_tn == 1.0 and stats[("b", "a")].kind == BIGRAM_PLUS


def test_cooccur_examples():
    stats = cooccur_pairs([["c", "a", "b"], ["a"]], [P, N], {"a", "b", "c"})
    assert set(stats) == {("a", "b"), ("a", "c"), ("b", "c")}
    assert stats[("a", "b")].s_ab == 1.0 and stats[("a", "b")].kind == COOCCUR


@given(st.lists(st.sampled_from("abcdef"), max_size=15), st.sets(st.sampled_from("abcdef")))
def test_pair_features_match_oracle(stems, vocab):
    filtered = filter_document(stems, vocab)
    assert set(document_features(stems, BIGRAM_PLUS, vocab)) == pairs_oracle(filtered, True)
    assert set(document_features(stems, COOCCUR, vocab)) == pairs_oracle(filtered, False)
    for a, b in document_features(stems, COOCCUR, vocab):
        assert a < b and a in vocab and b in vocab
    assert document_features(stems, WORD, vocab) == filtered


@given(st.lists(st.lists(st.sampled_from("abcde"), max_size=6), min_size=2, max_size=12))
def test_probabilities_bounded(docs):
    labels = [P, N] * (len(docs) // 2) + [P] * (len(docs) % 2)
    for s in word_class_probs(docs, labels).values():
        assert 0 <= s.p_tp <= 1 and 0 <= s.p_tn <= 1
        assert s.s == abs(s.p_tp - s.p_tn)


def test_count_mentions():
    rec = LexiconRecognizer(["p53", "MDM2"])
    assert count_mentions("p53 binds p53 and MDM2", rec) == 2
    assert count_mentions("nothing here", rec) == 0
    assert count_mentions("p53", LexiconRecognizer([])) == 0


def test_lexicon_longest_match_and_boundaries():
    rec = LexiconRecognizer(["Ras", "Ras GTPase"])
    assert rec.mentions("the Ras GTPase and Rasa1, ras") == ["ras gtpase", "ras"]


def test_mention_table(tmp_path):
    p = tmp_path / "m.jsonl"
    p.write_text('{"id": "d1", "mentions": ["Abc1", "Xyz"]}\n')
    table = MentionTable.from_jsonl(p)
    assert table.recognizer_for("d1").mentions("ABC1 with xyz") == ["abc1", "xyz"]
    assert table.recognizer_for("other").mentions("ABC1") == []


def test_feature_tsv_round_trip(tmp_path):
    stats = cooccur_pairs([["a", "b", "c"], ["a", "c"]], [P, N], {"a", "b", "c"})
    path = tmp_path / "f.tsv"
    write_feature_tsv(stats, path)
    back = read_feature_tsv(path, COOCCUR)
    assert back == stats
    words = word_class_probs([["a", "b"], ["b"]], [P, N])
    write_s_histogram(words, tmp_path / "h.tsv")
    lines = (tmp_path / "h.tsv").read_text().splitlines()
    assert lines[0] == "stem\trank\ts" and lines[1].startswith("a\t1\t")
