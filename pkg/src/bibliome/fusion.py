"""Entropy-based selection among classifiers, per document.

Training documents vote for their own class with weight equal to their
cosine similarity to the test document in a compound feature space.  For a
method M only the training documents that M classified correctly vote.  The
vote shares give a two-class distribution whose Shannon entropy is M's
uncertainty on the document; the least uncertain method's label wins.

A two-class entropy is a coarse reliability signal (it saturates quickly),
but it is computed exactly as defined here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy import sparse

from bibliome.corpus import Label


@dataclass(frozen=True)
class VoteDistribution:
    rho_tp: float
    rho_tn: float
    flags: tuple = ()


@dataclass(frozen=True)
class MethodPrediction:
    method_id: str
    label: Label
    uncertainty: float


class CompoundSpace:
    """Binary presence vectors over the union of several feature sets."""

    def __init__(self, features: Iterable):
        self.features = tuple(dict.fromkeys(features))
        self._index = {f: j for j, f in enumerate(self.features)}

    def __len__(self):
        return len(self.features)

    def vectorize(self, doc_features: Sequence[Iterable]) -> sparse.csr_matrix:
        rows, cols = [], []
        for i, feats in enumerate(doc_features):
            js = {self._index[f] for f in feats if f in self._index}
            rows.extend([i] * len(js))
            cols.extend(sorted(js))
        data = np.ones(len(rows))
        return sparse.csr_matrix((data, (rows, cols)), shape=(len(doc_features), len(self.features)))

    @staticmethod
    def cosines(test: sparse.csr_matrix, train: sparse.csr_matrix) -> np.ndarray:
        """Dense test x train cosine matrix; rows or columns with no features give 0."""

        def unit(m):
            norms = np.sqrt(np.asarray(m.multiply(m).sum(axis=1)).ravel())
            inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
            return sparse.diags(inv) @ m

        return np.asarray((unit(test) @ unit(train).T).todense())


def vote_probs(cosines: Sequence[float], labels: Sequence[Label], mask: Optional[Sequence[bool]] = None) -> VoteDistribution:
    """Cosine-weighted class vote shares of the training documents.

    Negative cosines are clamped to zero.  ``mask`` restricts the voters
    (e.g. to documents a method got right in training).  With no vote mass
    the distribution is uniform and flagged.
    """
    cos = np.clip(np.asarray(cosines, dtype=float), 0.0, None)
    pos = np.array([lab is Label.POSITIVE for lab in labels])
    neg = np.array([lab is Label.NEGATIVE for lab in labels])
    if mask is not None:
        m = np.asarray(mask, dtype=bool)
        pos &= m
        neg &= m
    tp_mass = math.fsum(cos[pos])
    tn_mass = math.fsum(cos[neg])
    total = tp_mass + tn_mass
    if total == 0:
        return VoteDistribution(0.5, 0.5, ("no_votes",))
    return VoteDistribution(tp_mass / total, tn_mass / total)


def entropy(dist: VoteDistribution) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    u = 0.0
    for p in (dist.rho_tp, dist.rho_tn):
        if p > 0:
            u -= p * math.log2(p)
    return min(max(u, 0.0), 1.0)


def integrate(predictions: Sequence[MethodPrediction], priority: Sequence[str] = ()) -> MethodPrediction:
    """The prediction with the lowest uncertainty.

    Exact ties go to the method listed first in ``priority``; methods absent
    from ``priority`` come after it, in input order.
    """
    if not predictions:
        raise ValueError("integrate needs at least one prediction")
    order = {m: i for i, m in enumerate(priority)}

    def key(item):
        pos, pred = item
        return (pred.uncertainty, order.get(pred.method_id, len(order)), pos)

    return min(enumerate(predictions), key=key)[1]


@dataclass(frozen=True)
class FusedDecision:
    doc_id: str
    chosen: MethodPrediction
    per_method: tuple = field(default=())

    @property
    def label(self) -> Label:
        return self.chosen.label

    def to_json(self) -> dict:
        return {
            "id": self.doc_id,
            "chosen_method": self.chosen.method_id,
            "label": self.chosen.label.value,
            "U": self.chosen.uncertainty,
            "per_method": [
                {"method": p.method_id, "label": p.label.value, "U": p.uncertainty} for p in self.per_method
            ],
        }


def fuse(
    doc_ids: Sequence[str],
    test_train_cosines: np.ndarray,
    train_labels: Sequence[Label],
    method_labels: Mapping[str, Sequence[Label]],
    train_correct: Mapping[str, Sequence[bool]],
    priority: Sequence[str] = (),
    use_correctness_mask: bool = True,
) -> list[FusedDecision]:
    """Uncertainty integration over a batch of test documents.

    ``method_labels[m][i]`` is method m's label for test document i and
    ``train_correct[m][j]`` says whether m classified training document j
    correctly.  With ``use_correctness_mask=False`` every training document
    votes for every method.
    """
    methods = list(method_labels)
    priority = tuple(priority) or tuple(methods)
    out = []
    for i, doc_id in enumerate(doc_ids):
        preds = []
        for m in methods:
            mask = train_correct[m] if use_correctness_mask else None
            dist = vote_probs(test_train_cosines[i], train_labels, mask)
            preds.append(MethodPrediction(m, method_labels[m][i], entropy(dist)))
        out.append(FusedDecision(doc_id, integrate(preds, priority), tuple(preds)))
    return out


def relevance_score(d: FusedDecision) -> float:
    """Scalar for ranking: ``1 - U`` for positive calls, ``U - 1`` for negative ones."""
    certainty = 1.0 - d.chosen.uncertainty
    return certainty if d.label is Label.POSITIVE else -certainty


def relevance_order(decisions: Sequence[FusedDecision]) -> list[str]:
    """Document ids from most to least likely relevant."""
    return [d.doc_id for d in sorted(decisions, key=lambda d: (-relevance_score(d), d.doc_id))]


def write_fusion_report(decisions: Iterable[FusedDecision], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in decisions:
            fh.write(json.dumps(d.to_json()) + "\n")
