"""Corpus data model, JSON Lines ingestion and balanced train/test partitioning."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np


class Label(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNLABELED = "unlabeled"

    @classmethod
    def parse(cls, value) -> "Label":
        if value is None:
            return cls.UNLABELED
        try:
            return cls(value)
        except ValueError:
            raise ValueError(f"unknown label {value!r}") from None

    def to_json(self):
        return None if self is Label.UNLABELED else self.value


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    paragraphs: tuple = ()
    label: Label = Label.UNLABELED

    def __post_init__(self):
        if not self.paragraphs:
            object.__setattr__(self, "paragraphs", (self.text,))
        else:
            object.__setattr__(self, "paragraphs", tuple(self.paragraphs))

    @classmethod
    def from_paragraphs(cls, id: str, paragraphs: Sequence[str], label: Label = Label.UNLABELED) -> "Document":
        return cls(id, "\n\n".join(paragraphs), tuple(paragraphs), label)

    def to_json(self) -> dict:
        rec = {"id": self.id, "text": self.text}
        if len(self.paragraphs) > 1 or self.paragraphs[0] != self.text:
            rec["paragraphs"] = list(self.paragraphs)
        rec["label"] = self.label.to_json()
        return rec


class Corpus(Sequence[Document]):
    """Immutable, id-indexed collection of documents."""

    def __init__(self, documents: Iterable[Document]):
        self._docs = tuple(documents)
        self._index = {}
        for i, doc in enumerate(self._docs):
            if doc.id in self._index:
                raise CorpusError(f"duplicate id {doc.id}")
            self._index[doc.id] = i

    def __len__(self):
        return len(self._docs)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Corpus(self._docs[i])
        return self._docs[i]

    def __iter__(self) -> Iterator[Document]:
        return iter(self._docs)

    def __contains__(self, doc_id) -> bool:
        return doc_id in self._index

    def __repr__(self):
        return f"Corpus({len(self)} docs)"

    def get(self, doc_id: str) -> Document:
        return self._docs[self._index[doc_id]]

    @property
    def ids(self) -> list[str]:
        return [d.id for d in self._docs]

    def subset(self, ids: Iterable[str]) -> "Corpus":
        """Documents with the given ids, in corpus order."""
        wanted = set(ids)
        return Corpus(d for d in self._docs if d.id in wanted)

    def with_label(self, label: Label) -> list[Document]:
        return [d for d in self._docs if d.label is label]

    @property
    def labeled(self) -> "Corpus":
        return Corpus(d for d in self._docs if d.label is not Label.UNLABELED)


def parse_record(obj, lineno: int) -> Document:
    if not isinstance(obj, dict):
        raise CorpusError(f"line {lineno}: expected a JSON object")
    for key in ("id", "text"):
        if key not in obj:
            raise CorpusError(f"line {lineno}: missing field {key!r}")
    if not isinstance(obj["id"], str) or not isinstance(obj["text"], str):
        raise CorpusError(f"line {lineno}: 'id' and 'text' must be strings")
    paragraphs = obj.get("paragraphs")
    if paragraphs is not None:
        if not isinstance(paragraphs, list) or not all(isinstance(p, str) for p in paragraphs):
            raise CorpusError(f"line {lineno}: 'paragraphs' must be a list of strings")
    try:
        label = Label.parse(obj.get("label"))
    except ValueError as exc:
        raise CorpusError(f"line {lineno}: {exc}") from None
    return Document(obj["id"], obj["text"], tuple(paragraphs or ()), label)


def load_corpus(path) -> Corpus:
    docs = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            doc = parse_record(obj, lineno)
            if doc.id in seen:
                raise CorpusError(f"duplicate id {doc.id}")
            seen.add(doc.id)
            docs.append(doc)
    return Corpus(docs)


def save_corpus(corpus: Iterable[Document], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus:
            fh.write(json.dumps(doc.to_json(), ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class Partition:
    train: frozenset
    test: frozenset
    seed: int
    index: int = 0
    holdout: bool = field(default=False, compare=False)


def balanced_test_size(n_docs: int, test_fraction: float) -> int:
    """floor(fraction * n) rounded down to an even count."""
    n_test = math.floor(test_fraction * n_docs)
    return n_test - n_test % 2


def make_partitions(
    corpus: Corpus,
    n_partitions: int = 8,
    test_fraction: float = 0.25,
    seed: int = 0,
    holdout: Optional[Corpus] = None,
) -> list[Partition]:
    """Draw ``n_partitions`` independent balanced train/test splits.

    Each test set holds equal numbers of positive and negative documents
    sampled without replacement.  With ``holdout`` given, test sets are drawn
    from the holdout corpus and every labeled document of ``corpus`` trains
    (the additional-data protocol).
    """
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must lie in (0, 1)")
    if n_partitions < 1:
        raise ValueError("n_partitions must be >= 1")
    pool = holdout if holdout is not None else corpus
    if holdout is not None:
        clash = set(corpus.ids) & set(holdout.ids)
        if clash:
            raise CorpusError(f"holdout shares ids with training corpus: {sorted(clash)[:5]}")

    pos = sorted(d.id for d in pool.with_label(Label.POSITIVE))
    neg = sorted(d.id for d in pool.with_label(Label.NEGATIVE))
    if len(pos) < 2 or len(neg) < 2:
        raise CorpusError(
            f"need at least 2 positive and 2 negative documents, have {len(pos)} positive and {len(neg)} negative"
        )
    half = balanced_test_size(len(pool.labeled), test_fraction) // 2
    if half == 0:
        raise CorpusError("test_fraction leaves an empty test set")
    if len(pos) < half or len(neg) < half:
        raise CorpusError(
            f"balanced test set needs {half} documents per class, have {len(pos)} positive and {len(neg)} negative"
        )

    rng = np.random.default_rng(seed)
    all_train = frozenset(d.id for d in corpus.labeled)
    parts = []
    for i in range(n_partitions):
        test = frozenset(rng.choice(pos, half, replace=False).tolist()) | frozenset(
            rng.choice(neg, half, replace=False).tolist()
        )
        train = all_train if holdout is not None else all_train - test
        parts.append(Partition(train, test, seed, i, holdout is not None))
    return parts
