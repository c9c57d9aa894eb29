"""Seeded synthetic corpora with planted discriminative words.

Words are pronounceable pseudo-words chosen so that preprocessing leaves
them unchanged (no stopwords, Porter fixed points), which makes the planted
class probabilities visible directly in the fitted feature statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bibliome.corpus import Corpus, Document, Label
from bibliome.porter import porter_stem
from bibliome.textprep import DEFAULT_POLICY

_ONSETS = "b d f g k l m n p r t v z".split()
_VOWELS = "a o u".split()


def pseudo_words(n: int, rng: np.random.Generator, exclude=frozenset()) -> list[str]:
    out: list[str] = []
    seen = set(exclude)
    while len(out) < n:
        syllables = rng.integers(2, 4)
        w = "".join(rng.choice(_ONSETS) + rng.choice(_VOWELS) for _ in range(syllables)) + rng.choice(["k", "t", "m", "x"])
        if w in seen or w in DEFAULT_POLICY or porter_stem(w) != w:
            continue
        seen.add(w)
        out.append(w)
    return out


def protein_names(n: int, rng: np.random.Generator) -> list[str]:
    names = set()
    while len(names) < n:
        letters = "".join(rng.choice(list("ABCDEFGHKLMNPRSTVXZ"), size=3))
        names.add(f"{letters}{rng.integers(1, 99)}")
    return sorted(names)


@dataclass(frozen=True)
class SyntheticSpec:
    n_docs: int = 400
    n_signal: int = 20
    p_high: float = 0.6
    p_low: float = 0.1
    n_noise: int = 200
    p_noise: float = 0.05
    n_proteins: int = 60
    mentions_pos: float = 4.0
    mentions_neg: float = 1.5
    sentence_len: int = 8


@dataclass(frozen=True)
class Vocabulary:
    positive: tuple
    negative: tuple
    noise: tuple
    proteins: tuple

    @property
    def signal(self) -> tuple:
        return self.positive + self.negative


def make_vocabulary(spec: SyntheticSpec = SyntheticSpec(), seed: int = 0) -> Vocabulary:
    rng = np.random.default_rng(seed)
    words = pseudo_words(spec.n_signal + spec.n_noise, rng)
    half = spec.n_signal // 2
    return Vocabulary(
        tuple(words[:half]),
        tuple(words[half : spec.n_signal]),
        tuple(words[spec.n_signal :]),
        tuple(protein_names(spec.n_proteins, rng)),
    )


def _sentences(tokens: list[str], rng: np.random.Generator, length: int) -> str:
    rng.shuffle(tokens)
    out = []
    for i in range(0, len(tokens), length):
        chunk = tokens[i : i + length]
        chunk[0] = chunk[0][:1].upper() + chunk[0][1:]
        out.append(" ".join(chunk) + ".")
    return " ".join(out)


def make_document(doc_id: str, label: Label, vocab: Vocabulary, spec: SyntheticSpec, rng: np.random.Generator) -> Document:
    positive = label is Label.POSITIVE
    tokens = []
    for w in vocab.positive:
        if rng.random() < (spec.p_high if positive else spec.p_low):
            tokens.append(w)
    for w in vocab.negative:
        if rng.random() < (spec.p_low if positive else spec.p_high):
            tokens.append(w)
    tokens += [w for w in vocab.noise if rng.random() < spec.p_noise]
    n_mentions = rng.poisson(spec.mentions_pos if positive else spec.mentions_neg)
    tokens += list(rng.choice(vocab.proteins, size=n_mentions, replace=True))
    if not tokens:
        tokens = [rng.choice(vocab.noise)]
    return Document(doc_id, _sentences(tokens, rng, spec.sentence_len), (), label)


def make_corpus(spec: SyntheticSpec = SyntheticSpec(), seed: int = 0, prefix: str = "d", vocab_seed: int = 0) -> Corpus:
    """Balanced labeled corpus; ``vocab_seed`` fixes the shared vocabulary."""
    vocab = make_vocabulary(spec, vocab_seed)
    rng = np.random.default_rng([seed, 1])
    labels = [Label.POSITIVE, Label.NEGATIVE] * (spec.n_docs // 2) + [Label.POSITIVE] * (spec.n_docs % 2)
    return Corpus(make_document(f"{prefix}{i:04d}", lab, vocab, spec, rng) for i, lab in enumerate(labels))


def make_fulltext(n_docs: int = 5, seed: int = 0, spec: SyntheticSpec = SyntheticSpec(), paragraphs: int = 6, vocab_seed: int = 0):
    """Multi-paragraph articles plus evidence sentences.

    Returns ``(corpus, evidence_sentences)``.  Roughly half the paragraphs
    are interaction-like (positive words and several protein mentions).
    """
    vocab = make_vocabulary(spec, vocab_seed)
    rng = np.random.default_rng([seed, 2])
    docs = []
    evidence = []
    for i in range(n_docs):
        paras = []
        for _ in range(paragraphs):
            if rng.random() < 0.5:
                words = [w for w in vocab.positive if rng.random() < spec.p_high]
                words += list(rng.choice(vocab.proteins, size=rng.integers(2, 5)))
                words += ["with"] * rng.integers(1, 3)
            else:
                words = [w for w in vocab.negative if rng.random() < spec.p_high]
                words += list(rng.choice(vocab.proteins, size=rng.integers(0, 2)))
            words += [w for w in vocab.noise if rng.random() < spec.p_noise * 2]
            if not words:
                words = [rng.choice(vocab.noise)]
            paras.append(_sentences(words, rng, spec.sentence_len))
        docs.append(Document.from_paragraphs(f"ft{i:03d}", paras))
        for _ in range(3):
            words = list(rng.choice(vocab.positive, size=4, replace=False)) + ["with"] + list(rng.choice(vocab.proteins, size=2))
            evidence.append(_sentences(words, rng, len(words)))
    return Corpus(docs), evidence
