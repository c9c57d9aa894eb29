"""Tokenization, stemming and stopword filtering shared by every other module."""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable

from bibliome.porter import porter_stem

# Alphanumeric runs joined by single internal hyphens ("two-hybrid").
_TOKEN_RE = re.compile(r"[a-z0-9]+(?:-[a-z0-9]+)*")
_DIGIT_RE = re.compile(r"[0-9]")

# Never treated as a stopword: it marks interaction syntax ("interacts with").
KEPT_WORD = "with"


@dataclass(frozen=True)
class Token:
    surface: str
    stem: str

    @classmethod
    def of(cls, surface: str) -> "Token":
        return cls(surface, stem(surface))


@dataclass(frozen=True)
class StopwordPolicy:
    words: frozenset

    def __post_init__(self):
        object.__setattr__(self, "words", frozenset(w.lower() for w in self.words) - {KEPT_WORD})

    def __contains__(self, word: str) -> bool:
        return word in self.words

    @classmethod
    def from_file(cls, path) -> "StopwordPolicy":
        with open(path, encoding="utf-8") as fh:
            return cls(frozenset(line.strip() for line in fh if line.strip()))

    @classmethod
    def default(cls) -> "StopwordPolicy":
        return DEFAULT_POLICY


def _load_default() -> StopwordPolicy:
    text = resources.files("bibliome").joinpath("data/stopwords.txt").read_text(encoding="utf-8")
    return StopwordPolicy(frozenset(line.strip() for line in text.splitlines() if line.strip()))


DEFAULT_POLICY = _load_default()


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and split it into alphanumeric tokens.

    Hyphens survive only between two alphanumeric characters, so
    ``"DNA-binding"`` stays one token while ``"-p53-"`` becomes ``"p53"``.
    """
    return _TOKEN_RE.findall(text.lower())


def stem(token: str) -> str:
    if not token:
        raise ValueError("cannot stem an empty token")
    return porter_stem(token)


def is_short(token: str) -> bool:
    """True for words with two or fewer letters.

    Tokens carrying a digit or a hyphen are never short, so protein names
    such as ``p53`` survive filtering.
    """
    if _DIGIT_RE.search(token) or "-" in token:
        return False
    return len(token) <= 2


def preprocess(text: str, policy: StopwordPolicy = DEFAULT_POLICY) -> list[str]:
    """Ordered stem sequence of ``text`` with short words and stopwords removed."""
    out = []
    for tok in tokenize(text):
        if is_short(tok) or tok in policy:
            continue
        s = porter_stem(tok)
        # Stemming can shorten a word ("gas" -> "ga"); the length rule holds on output too.
        if not is_short(s):
            out.append(s)
    return out


def preprocess_paragraphs(paragraphs: Iterable[str], policy: StopwordPolicy = DEFAULT_POLICY) -> list[list[str]]:
    return [preprocess(p, policy) for p in paragraphs]
