"""Paragraph ranking and protein-pair extraction for full-text articles.

Paragraphs are ordered by three preferences: word-pair feature matches (A),
protein mentions (B) and sentence features (C).  Products of those ranks
give three combined orderings.  Protein pairs are read off sentences of the
surviving paragraphs and ranked by their best paragraph.
"""

from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from bibliome.features import PairStat
from bibliome.vtt import term_weight

# Tokens ending in a period that do not close a sentence.
ABBREVIATIONS = frozenset(
    """al approx ca cf co dr e.g eg etc fig figs i.e ie inc mr mrs ms no nos ref refs resp sp spp st suppl vol vs""".split()
)

_BOUNDARY_RE = re.compile(r"[.?!]+(?=\s+[A-Z0-9])")


def split_sentences(text: str) -> list[str]:
    """Split at ``.``, ``?`` or ``!`` followed by whitespace and an uppercase letter or digit.

    A period ending a known abbreviation ("et al.", "Fig.") or a single
    capital letter initial does not end a sentence.
    """
    sentences = []
    start = 0
    for m in _BOUNDARY_RE.finditer(text):
        if m.group(0) == ".":
            word = text[start : m.start()].split()[-1:] or [""]
            last = word[0].lstrip("([").lower()
            if last in ABBREVIATIONS or (len(last) == 1 and last.isalpha()):
                continue
        end = m.end()
        piece = text[start:end].strip()
        if piece:
            sentences.append(piece)
        start = end
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


@dataclass(frozen=True)
class PairPpiScore:
    pair: tuple
    p: float
    rank: int


def ppi_score(p_tp: float, p_tn: float) -> float:
    """p_tp times the cosine of the (p_tp, p_tn) angle: p_tp^2 / sqrt(p_tp^2 + p_tn^2)."""
    if p_tp == 0:
        return 0.0
    return p_tp * term_weight(p_tp, p_tn).cos_alpha


def pair_ppi_scores(pair_stats: Mapping[tuple, PairStat], top_n: int = 1000) -> list[PairPpiScore]:
    scored = sorted(((ppi_score(st.p_tp, st.p_tn), pair) for pair, st in pair_stats.items()), key=lambda x: (-x[0], x[1]))
    return [PairPpiScore(pair, p, i) for i, (p, pair) in enumerate(scored[:top_n], start=1)]


@dataclass(frozen=True)
class SentenceFeature:
    stem: str
    f_ppi: int
    f_c: int
    ss: float


def sentence_feature_score(f_ppi: float, f_c: float) -> float:
    """f_ppi^2 / sqrt(f_ppi^2 + f_c^2)."""
    if f_ppi == 0:
        return 0.0
    return f_ppi * term_weight(f_ppi, f_c).cos_alpha


def sentence_features(
    evidence: Sequence[Sequence[str]], corpus: Sequence[Sequence[str]], top_n: int = 200
) -> list[SentenceFeature]:
    """Stems most characteristic of interaction evidence sentences.

    ``evidence`` and ``corpus`` are stem sequences; frequencies are raw counts.
    Stems absent from the evidence score 0 and are not listed.
    """
    if not evidence or not corpus:
        raise ValueError("sentence features need evidence sentences and a corpus")
    f_ppi = Counter(s for sent in evidence for s in sent)
    f_c = Counter(s for doc in corpus for s in doc)
    feats = [SentenceFeature(w, f_ppi[w], f_c[w], sentence_feature_score(f_ppi[w], f_c[w])) for w in f_ppi]
    feats.sort(key=lambda f: (-f.ss, f.stem))
    return feats[:top_n]


@dataclass(frozen=True)
class ParagraphRank:
    """Ranks of one paragraph; 0 means excluded."""

    doc_id: str
    paragraph_index: int
    rank_a: int
    rank_b: int
    rank_c: int
    combined_1: int = 0
    combined_2: int = 0
    combined_3: int = 0


def _ordinal_ranks(scores: Sequence[float]) -> list[int]:
    """Rank by decreasing score, ties by position; zero scores are excluded (rank 0)."""
    order = sorted((i for i, s in enumerate(scores) if s > 0), key=lambda i: (-scores[i], i))
    ranks = [0] * len(scores)
    for r, i in enumerate(order, start=1):
        ranks[i] = r
    return ranks


def paragraph_scores(
    paragraph_stems: Sequence[Sequence[str]],
    paragraph_mentions: Sequence[Sequence[str]],
    pair_ranks: Mapping[tuple, int],
    sentence_feature_set: Iterable[str],
):
    """Raw criterion scores (A, B, C) per paragraph.

    A sums 1/rank over the distinct word-pair features whose stems both occur
    in the paragraph; B counts distinct mentions; C counts distinct sentence
    features present.
    """
    sf = frozenset(sentence_feature_set)
    a, b, c = [], [], []
    for stems, mentions in zip(paragraph_stems, paragraph_mentions):
        present = set(stems)
        a.append(sum(1.0 / r for (w1, w2), r in pair_ranks.items() if w1 in present and w2 in present))
        b.append(len(set(mentions)))
        c.append(len(present & sf))
    return a, b, c


def rank_paragraphs(
    doc_id: str,
    paragraph_stems: Sequence[Sequence[str]],
    paragraph_mentions: Sequence[Sequence[str]],
    pair_ranks: Mapping[tuple, int],
    sentence_feature_set: Iterable[str],
) -> list[ParagraphRank]:
    if not paragraph_stems:
        raise ValueError("document has no paragraphs")
    a, b, c = paragraph_scores(paragraph_stems, paragraph_mentions, pair_ranks, sentence_feature_set)
    ra, rb, rc = _ordinal_ranks(a), _ordinal_ranks(b), _ordinal_ranks(c)
    return [ParagraphRank(doc_id, i, ra[i], rb[i], rc[i]) for i in range(len(paragraph_stems))]


def _product(*ranks: int) -> int:
    out = 1
    for r in ranks:
        if r == 0:
            return 0
        out *= r
    return out


def combine_ranks(ranks: Sequence[ParagraphRank]) -> list[ParagraphRank]:
    """Fill in rank products A*B, B*C and A*B*C (0 when any constituent is excluded)."""
    return [
        ParagraphRank(
            r.doc_id,
            r.paragraph_index,
            r.rank_a,
            r.rank_b,
            r.rank_c,
            _product(r.rank_a, r.rank_b),
            _product(r.rank_b, r.rank_c),
            _product(r.rank_a, r.rank_b, r.rank_c),
        )
        for r in ranks
    ]


def combined_order(ranks: Sequence[ParagraphRank], combination: int) -> dict[int, int]:
    """Paragraph index -> ordinal position (1 = best) under combination 1, 2 or 3.

    Excluded paragraphs are absent; ties keep paragraph order.
    """
    attr = {1: "combined_1", 2: "combined_2", 3: "combined_3"}[combination]
    kept = sorted((r for r in ranks if getattr(r, attr) > 0), key=lambda r: (getattr(r, attr), r.paragraph_index))
    return {r.paragraph_index: pos for pos, r in enumerate(kept, start=1)}


@dataclass(frozen=True)
class ExtractedPair:
    doc_id: str
    mention_1: str
    mention_2: str
    rank: int
    paragraph_index: int
    sentence_index: int


def extract_pairs(
    doc_id: str,
    paragraphs: Sequence[str],
    paragraph_order: Mapping[int, int],
    recognizer,
) -> list[ExtractedPair]:
    """Mention pairs sharing a sentence in any ranked paragraph.

    A pair's rank is that of the best paragraph where it co-occurs; the
    reported sentence is its first co-occurrence in that paragraph.
    """
    best: dict = {}
    for p_idx in sorted(paragraph_order, key=lambda i: (paragraph_order[i], i)):
        rank = paragraph_order[p_idx]
        for s_idx, sentence in enumerate(split_sentences(paragraphs[p_idx])):
            found = sorted(set(recognizer.mentions(sentence)))
            for m1, m2 in combinations(found, 2):
                if (m1, m2) not in best:
                    best[(m1, m2)] = ExtractedPair(doc_id, m1, m2, rank, p_idx, s_idx)
    return sorted(best.values(), key=lambda e: (e.rank, e.mention_1, e.mention_2))


@dataclass(frozen=True)
class RankedSentence:
    doc_id: str
    paragraph_index: int
    sentence_index: int
    score: int
    rank: int = 0


def rank_sentences(
    doc_id: str,
    paragraphs: Sequence[str],
    paragraph_order: Mapping[int, int],
    recognizer,
    feature_stems: Iterable[str],
    preprocess,
) -> list[RankedSentence]:
    """Evidence passages: sentences of ranked paragraphs holding at least one mention pair.

    Sentences are scored by the number of distinct ``feature_stems`` they
    contain and ordered by score, then paragraph rank, then position.
    """
    feats = frozenset(feature_stems)
    cands = []
    for p_idx, p_rank in paragraph_order.items():
        for s_idx, sentence in enumerate(split_sentences(paragraphs[p_idx])):
            if len(set(recognizer.mentions(sentence))) < 2:
                continue
            score = len(set(preprocess(sentence)) & feats)
            cands.append((-score, p_rank, p_idx, s_idx))
    cands.sort()
    return [
        RankedSentence(doc_id, p_idx, s_idx, -neg, pos)
        for pos, (neg, _, p_idx, s_idx) in enumerate(cands, start=1)
    ]


def write_ips_tsv(rows: Iterable[tuple], path) -> None:
    """rows: (ExtractedPair, combination) tuples."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["doc_id", "mention_1", "mention_2", "rank", "combination"])
        for pair, combination in rows:
            w.writerow([pair.doc_id, pair.mention_1, pair.mention_2, pair.rank, combination])


def write_iss_tsv(rows: Iterable[RankedSentence], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["doc_id", "paragraph_index", "sentence_index", "rank"])
        for r in rows:
            w.writerow([r.doc_id, r.paragraph_index, r.sentence_index, r.rank])
