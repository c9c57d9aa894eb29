"""Preprocessed documents, feature-space fitting and VTT training."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from bibliome.corpus import Corpus, Document, Label
from bibliome.features import (
    BIGRAM_PLUS,
    COOCCUR,
    FEATURE_KINDS,
    WORD,
    WordFeatureSet,
    bigrams_plus,
    cooccur_pairs,
    count_mentions,
    select_top_words,
    word_class_probs,
)
from bibliome.textprep import DEFAULT_POLICY, StopwordPolicy, preprocess
from bibliome.vtt import VttModel


@dataclass(frozen=True)
class ProcessedDoc:
    id: str
    label: Label
    stems: tuple
    np: int


def recognizer_for(recognizer, doc_id: str):
    """Resolve a per-document recognizer (``MentionTable``) or pass a shared one through."""
    if hasattr(recognizer, "recognizer_for"):
        return recognizer.recognizer_for(doc_id)
    return recognizer


def process_document(doc: Document, recognizer, policy: StopwordPolicy = DEFAULT_POLICY) -> ProcessedDoc:
    np_count = count_mentions(doc.text, recognizer_for(recognizer, doc.id)) if recognizer is not None else 0
    return ProcessedDoc(doc.id, doc.label, tuple(preprocess(doc.text, policy)), np_count)


def process_corpus(corpus: Iterable[Document], recognizer, policy: StopwordPolicy = DEFAULT_POLICY) -> list[ProcessedDoc]:
    return [process_document(d, recognizer, policy) for d in corpus]


@dataclass(frozen=True)
class FeatureSpace:
    """Word statistics, the selected top-K words and pair statistics per kind."""

    words: Mapping
    vocabulary: WordFeatureSet
    pairs: Mapping = field(default_factory=dict)

    def stats(self, kind: str) -> Mapping:
        if kind == WORD:
            return {w: self.words[w] for w in self.vocabulary}
        return self.pairs[kind]


def fit_feature_space(docs: Sequence[ProcessedDoc], k: int = 650, kinds: Iterable[str] = FEATURE_KINDS) -> FeatureSpace:
    stems = [d.stems for d in docs]
    labels = [d.label for d in docs]
    words = word_class_probs(stems, labels)
    vocab = select_top_words(words, k)
    pairs = {}
    kinds = set(kinds)
    if BIGRAM_PLUS in kinds:
        pairs[BIGRAM_PLUS] = bigrams_plus(stems, labels, vocab)
    if COOCCUR in kinds:
        pairs[COOCCUR] = cooccur_pairs(stems, labels, vocab)
    return FeatureSpace(words, vocab, pairs)


def vtt_from_space(space: FeatureSpace, kind: str, lambda0: float, beta: float, presence: bool = True) -> VttModel:
    return VttModel.from_stats(space.stats(kind), lambda0, beta, kind, space.vocabulary.stems, presence)


def train_vtt(
    docs: Sequence[ProcessedDoc],
    kind: str = COOCCUR,
    lambda0: float = 1.0,
    beta: float = 15,
    k: int = 650,
    presence: bool = True,
) -> VttModel:
    return vtt_from_space(fit_feature_space(docs, k, [kind]), kind, lambda0, beta, presence)


def labeled_docs(docs: Iterable[ProcessedDoc]) -> list[ProcessedDoc]:
    return [d for d in docs if d.label is not Label.UNLABELED]


def process_corpora(*corpora: Corpus, recognizer=None, policy: StopwordPolicy = DEFAULT_POLICY) -> dict[str, ProcessedDoc]:
    out = {}
    for corpus in corpora:
        for doc in corpus:
            out[doc.id] = process_document(doc, recognizer, policy)
    return out
