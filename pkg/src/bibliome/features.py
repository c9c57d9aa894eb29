"""Discriminative feature statistics.

Words and word pairs are scored by how differently often they appear in
positive and negative documents.  Probabilities are document-level presence
rates: ``p_tp(w)`` is the fraction of positive documents containing ``w``.
"""

from __future__ import annotations

import csv
import json
import re
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Optional, Protocol, Sequence, Union

from bibliome.corpus import Label

Pair = tuple  # (stem_a, stem_b)
Feature = Union[str, Pair]

BIGRAM_PLUS = "bigram_plus"
COOCCUR = "cooccur"
WORD = "word"
FEATURE_KINDS = (WORD, BIGRAM_PLUS, COOCCUR)


@dataclass(frozen=True)
class WordStat:
    stem: str
    p_tp: float
    p_tn: float

    @property
    def s(self) -> float:
        return abs(self.p_tp - self.p_tn)


@dataclass(frozen=True)
class PairStat:
    pair: Pair
    p_tp: float
    p_tn: float
    kind: str

    @property
    def s_ab(self) -> float:
        return abs(self.p_tp - self.p_tn)

    s = s_ab


@dataclass(frozen=True)
class WordFeatureSet:
    """Top-K stems ordered by decreasing S (rank 1 first)."""

    stems: tuple
    short: bool = False

    def __post_init__(self):
        object.__setattr__(self, "_members", frozenset(self.stems))

    def __contains__(self, stem) -> bool:
        return stem in self._members

    def __len__(self):
        return len(self.stems)

    def __iter__(self):
        return iter(self.stems)

    def rank(self, stem: str) -> int:
        return self.stems.index(stem) + 1


def _class_counts(feature_sets: Iterable[Iterable], labels: Sequence[Label]):
    pos, neg = Counter(), Counter()
    n_pos = n_neg = 0
    for feats, label in zip(feature_sets, labels):
        if label is Label.POSITIVE:
            n_pos += 1
            pos.update(set(feats))
        elif label is Label.NEGATIVE:
            n_neg += 1
            neg.update(set(feats))
    if n_pos == 0 or n_neg == 0:
        raise ValueError(
            f"class probabilities need labeled documents of both classes (positive={n_pos}, negative={n_neg})"
        )
    return pos, neg, n_pos, n_neg


def word_class_probs(docs: Sequence[Sequence[str]], labels: Sequence[Label]) -> dict[str, WordStat]:
    """Per-stem presence probabilities in positive and negative documents.

    ``docs`` are preprocessed stem sequences aligned with ``labels``;
    unlabeled documents are ignored.
    """
    pos, neg, n_pos, n_neg = _class_counts(docs, labels)
    return {w: WordStat(w, pos[w] / n_pos, neg[w] / n_neg) for w in sorted(pos.keys() | neg.keys())}


def ranked(stats: Mapping[Feature, Union[WordStat, PairStat]]) -> list:
    """Stats ordered by decreasing S, ties broken by ascending feature."""
    return sorted(stats.values(), key=lambda st: (-st.s, _feature_key(st)))


def _feature_key(st):
    return st.stem if isinstance(st, WordStat) else st.pair


def select_top_words(stats: Mapping[str, WordStat], k: int = 650) -> WordFeatureSet:
    if k < 1:
        raise ValueError("k must be >= 1")
    order = ranked(stats)
    return WordFeatureSet(tuple(st.stem for st in order[:k]), short=len(order) < k)


def filter_document(stems: Sequence[str], feature_set) -> list[str]:
    return [s for s in stems if s in feature_set]


def adjacent_pairs(filtered: Sequence[str]) -> list[Pair]:
    """Ordered pairs of neighbouring stems in an already filtered vector.

    Repeated stems (``x x``) do not form a pair.
    """
    return [(a, b) for a, b in zip(filtered, filtered[1:]) if a != b]


def cooccurring_pairs(filtered: Iterable[str]) -> list[Pair]:
    return list(combinations(sorted(set(filtered)), 2))


def _pair_stats(pair_sets, labels, kind) -> dict[Pair, PairStat]:
    pos, neg, n_pos, n_neg = _class_counts(pair_sets, labels)
    return {p: PairStat(p, pos[p] / n_pos, neg[p] / n_neg, kind) for p in sorted(pos.keys() | neg.keys())}


def bigrams_plus(docs: Sequence[Sequence[str]], labels: Sequence[Label], feature_set) -> dict[Pair, PairStat]:
    pair_sets = [adjacent_pairs(filter_document(d, feature_set)) for d in docs]
    return _pair_stats(pair_sets, labels, BIGRAM_PLUS)


def cooccur_pairs(docs: Sequence[Sequence[str]], labels: Sequence[Label], feature_set) -> dict[Pair, PairStat]:
    pair_sets = [cooccurring_pairs(filter_document(d, feature_set)) for d in docs]
    return _pair_stats(pair_sets, labels, COOCCUR)


def document_features(stems: Sequence[str], kind: str, vocabulary) -> list:
    """Features of one document in occurrence order (duplicates kept for words and bigrams)."""
    filtered = filter_document(stems, vocabulary)
    if kind == WORD:
        return filtered
    if kind == BIGRAM_PLUS:
        return adjacent_pairs(filtered)
    if kind == COOCCUR:
        return cooccurring_pairs(filtered)
    raise ValueError(f"unknown feature kind {kind!r}")


# -- protein mentions ---------------------------------------------------------


class MentionRecognizer(Protocol):
    def mentions(self, text: str) -> list[str]:
        """Case-folded mention strings found in ``text``, in order of appearance."""


class LexiconRecognizer:
    """Case-insensitive, longest-match lexicon lookup over raw text."""

    def __init__(self, lexicon: Iterable[str]):
        names = sorted({n.strip().casefold() for n in lexicon if n.strip()}, key=lambda n: (-len(n), n))
        self.lexicon = frozenset(names)
        if names:
            alternation = "|".join(re.escape(n) for n in names)
            self._re = re.compile(rf"(?<![0-9a-z])(?:{alternation})(?![0-9a-z])", re.IGNORECASE)
        else:
            self._re = None

    @classmethod
    def from_file(cls, path) -> "LexiconRecognizer":
        with open(path, encoding="utf-8") as fh:
            return cls(fh.read().splitlines())

    def mentions(self, text: str) -> list[str]:
        if self._re is None:
            return []
        return [m.group(0).casefold() for m in self._re.finditer(text)]


class MentionTable:
    """Precomputed mentions per document, e.g. output of an external tagger.

    Reads JSONL records ``{"id": str, "mentions": [str]}``.  Each document's
    mentions become a lexicon, so they can be located in paragraphs and
    sentences as well.
    """

    def __init__(self, mentions: Mapping[str, Sequence[str]]):
        self._by_id = {k: tuple(v) for k, v in mentions.items()}
        self._cache: dict = {}

    @classmethod
    def from_jsonl(cls, path) -> "MentionTable":
        table = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                rec = json.loads(line)
                if "id" not in rec or not isinstance(rec.get("mentions"), list):
                    raise ValueError(f"line {lineno}: expected {{'id': str, 'mentions': [str]}}")
                table[rec["id"]] = rec["mentions"]
        return cls(table)

    def recognizer_for(self, doc_id: str) -> LexiconRecognizer:
        if doc_id not in self._cache:
            self._cache[doc_id] = LexiconRecognizer(self._by_id.get(doc_id, ()))
        return self._cache[doc_id]


def count_mentions(text: str, recognizer: MentionRecognizer) -> int:
    """Number of distinct (case-folded) mention strings in ``text``."""
    return len(set(recognizer.mentions(text)))


# -- persistence ---------------------------------------------------------------


def format_feature(feature: Feature) -> str:
    return feature if isinstance(feature, str) else " ".join(feature)


def parse_feature(text: str) -> Feature:
    parts = text.split(" ")
    return parts[0] if len(parts) == 1 else tuple(parts)


def write_feature_tsv(stats: Mapping[Feature, Union[WordStat, PairStat]], path, limit: Optional[int] = None) -> None:
    """Columns: feature, p_tp, p_tn, score, rank.  Pair members are space-separated."""
    rows = ranked(stats)[:limit]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["feature", "p_tp", "p_tn", "score", "rank"])
        for rank, st in enumerate(rows, start=1):
            w.writerow([format_feature(_feature_key(st)), repr(st.p_tp), repr(st.p_tn), repr(st.s), rank])


def read_feature_tsv(path, kind: str = WORD) -> dict:
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh, delimiter="\t"):
            f = parse_feature(row["feature"])
            p_tp, p_tn = float(row["p_tp"]), float(row["p_tn"])
            out[f] = WordStat(f, p_tp, p_tn) if isinstance(f, str) else PairStat(f, p_tp, p_tn, kind)
    return out


def write_s_histogram(stats: Mapping[str, WordStat], path) -> None:
    """Ranked S values (stem, rank, S), the data behind choosing the K cutoff."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["stem", "rank", "s"])
        for rank, st in enumerate(ranked(stats), start=1):
            w.writerow([st.stem, rank, repr(st.s)])
