"""Variable trigonometric threshold classifier.

Each feature is a point ``(p_tp, p_tn)``; its weights are the cosine and sine
of the angle that point makes with the ``p_tp`` axis.  A document's positive
and negative evidence are the sums of those cosines and sines over its
features, and it is called positive when

    P / N >= lambda0 + (beta - np) / beta

where ``np`` is its protein mention count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from bibliome.corpus import Label
from bibliome.features import (
    FEATURE_KINDS,
    Feature,
    document_features,
    format_feature,
)

# Confidence reported when N = 0 and P > 0 (ratio is +inf).
CONFIDENCE_CAP = 10.0


@dataclass(frozen=True)
class BandCutoffs:
    low: float = 0.1
    high: float = 0.5

    def band(self, confidence: Optional[float]) -> str:
        if confidence is None or confidence <= self.low:
            return "low"
        if confidence >= self.high:
            return "high"
        return "medium"


DEFAULT_BANDS = BandCutoffs()


@dataclass(frozen=True)
class TermWeight:
    feature: Feature
    cos_alpha: float
    sin_alpha: float


def term_weight(p_tp: float, p_tn: float, feature: Feature = None) -> TermWeight:
    scale = max(p_tp, p_tn)
    if scale <= 0:
        raise ValueError("feature with p_tp = p_tn = 0 carries no signal")
    # rescale first so tiny probabilities keep full precision
    a, b = p_tp / scale, p_tn / scale
    norm = math.hypot(a, b)
    return TermWeight(feature, a / norm, b / norm)


@dataclass(frozen=True)
class VttModel:
    weights: Mapping[Feature, TermWeight]
    lambda0: float
    beta: float
    feature_kind: str
    vocabulary: tuple = ()
    presence: bool = True

    def __post_init__(self):
        if self.beta < 1:
            raise ValueError("beta must be >= 1")
        if self.lambda0 < 0:
            raise ValueError("lambda0 must be >= 0")
        if self.feature_kind not in FEATURE_KINDS:
            raise ValueError(f"unknown feature kind {self.feature_kind!r}")
        object.__setattr__(self, "_vocab", frozenset(self.vocabulary))

    @classmethod
    def from_stats(cls, stats, lambda0: float, beta: float, feature_kind: str, vocabulary=(), presence=True):
        weights = {f: term_weight(st.p_tp, st.p_tn, f) for f, st in stats.items()}
        if feature_kind == "word" and not vocabulary:
            vocabulary = tuple(weights)
        return cls(weights, lambda0, beta, feature_kind, tuple(vocabulary), presence)

    def with_params(self, lambda0: float, beta: float) -> "VttModel":
        return VttModel(self.weights, lambda0, beta, self.feature_kind, self.vocabulary, self.presence)

    def threshold(self, np_count: float) -> float:
        return self.lambda0 + (self.beta - np_count) / self.beta

    def features_of(self, stems: Sequence[str]) -> list:
        return document_features(stems, self.feature_kind, self._vocab)

    # -- persistence ----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "feature_kind": self.feature_kind,
            "lambda0": self.lambda0,
            "beta": self.beta,
            "presence": self.presence,
            "vocabulary": list(self.vocabulary),
            "weights": [
                {"feature": f if isinstance(f, str) else list(f), "cos": w.cos_alpha, "sin": w.sin_alpha}
                for f, w in sorted(self.weights.items(), key=lambda kv: format_feature(kv[0]))
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "VttModel":
        weights = {}
        for rec in obj["weights"]:
            f = rec["feature"]
            f = f if isinstance(f, str) else tuple(f)
            weights[f] = TermWeight(f, rec["cos"], rec["sin"])
        return cls(
            weights,
            obj["lambda0"],
            obj["beta"],
            obj["feature_kind"],
            tuple(obj.get("vocabulary", ())),
            obj.get("presence", True),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, ensure_ascii=False, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "VttModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def score(features: Iterable[Feature], model: VttModel) -> tuple[float, float]:
    """(P, N): summed cosine and sine weights of the matched features.

    With ``model.presence`` each distinct feature counts once.
    """
    feats = [f for f in features if f in model.weights]
    if model.presence:
        feats = set(feats)
    cos_terms = [model.weights[f].cos_alpha for f in feats]
    sin_terms = [model.weights[f].sin_alpha for f in feats]
    return math.fsum(cos_terms), math.fsum(sin_terms)


@dataclass(frozen=True)
class VttDecision:
    label: Label
    p_sum: float
    n_sum: float
    threshold: float
    margin: float
    confidence: Optional[float]
    band: str
    np: int
    flags: tuple = field(default=())

    @property
    def ratio(self) -> float:
        return evidence_ratio(self.p_sum, self.n_sum)


def evidence_ratio(p_sum: float, n_sum: float) -> float:
    if n_sum == 0:
        return math.inf if p_sum > 0 else 0.0
    return p_sum / n_sum


def confidence(ratio: float, threshold: float, bands: BandCutoffs = DEFAULT_BANDS):
    """Distance of ``ratio`` from the threshold relative to the threshold.

    Returns ``(C, band, flags)``; ``C`` is None when the threshold is zero.
    """
    if threshold == 0:
        return None, "low", ("zero_threshold",)
    if math.isinf(ratio):
        return CONFIDENCE_CAP, bands.band(CONFIDENCE_CAP), ("infinite_ratio",)
    c = abs(ratio - threshold) / abs(threshold)
    return c, bands.band(c), ()


def classify(p_sum: float, n_sum: float, np_count: int, model: VttModel, bands: BandCutoffs = DEFAULT_BANDS) -> VttDecision:
    t = model.threshold(np_count)
    if p_sum == 0 and n_sum == 0:
        # No evidence: never a confident call.
        return VttDecision(Label.NEGATIVE, 0.0, 0.0, t, -abs(t), 0.0, "low", np_count, ("no_evidence",))
    ratio = evidence_ratio(p_sum, n_sum)
    label = Label.POSITIVE if ratio >= t else Label.NEGATIVE
    c, band, flags = confidence(ratio, t, bands)
    return VttDecision(label, p_sum, n_sum, t, ratio - t, c, band, np_count, flags)


def classify_stems(stems: Sequence[str], np_count: int, model: VttModel, bands: BandCutoffs = DEFAULT_BANDS) -> VttDecision:
    p, n = score(model.features_of(stems), model)
    return classify(p, n, np_count, model, bands)


def rank(decisions: Mapping[str, VttDecision]):
    """Per-class rankings by decreasing distance from the threshold.

    Returns ``(positives, negatives, scores)`` where the lists hold document
    ids and ``scores`` maps each id to its signed margin ``P/N - T``, the
    single score used for AUC.
    """

    def order(ids):
        return sorted(ids, key=lambda i: (-abs(decisions[i].margin), i))

    pos = order(i for i, d in decisions.items() if d.label is Label.POSITIVE)
    neg = order(i for i, d in decisions.items() if d.label is Label.NEGATIVE)
    return pos, neg, {i: d.margin for i, d in decisions.items()}


def classify_batch(p_sums, n_sums, np_counts, lambda0s, betas):
    """Boolean positive calls for every (lambda0, beta, document) combination.

    Shape ``(len(lambda0s), len(betas), n_docs)``.  Uses the same arithmetic
    as :func:`classify`, including the no-evidence and N = 0 conventions.
    """
    p = np.asarray(p_sums, dtype=float)
    n = np.asarray(n_sums, dtype=float)
    npc = np.asarray(np_counts, dtype=float)
    lam = np.asarray(lambda0s, dtype=float)[:, None, None]
    beta = np.asarray(betas, dtype=float)[None, :, None]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = np.where(n == 0, np.where(p > 0, np.inf, 0.0), p / n)
    evidence = (p != 0) | (n != 0)
    threshold = lam + (beta - npc[None, None, :]) / beta
    return (ratio[None, None, :] >= threshold) & evidence[None, None, :]
