"""End-to-end assembly of the classifiers and the full-text passage ranker."""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from bibliome import fulltext, lsi
from bibliome.config import Config
from bibliome.corpus import Corpus, Document, Label
from bibliome.evaluation import auc, confusion, inclusive_range, metrics
from bibliome.features import BIGRAM_PLUS, COOCCUR, WORD, document_features
from bibliome.fusion import CompoundSpace, FusedDecision, fuse
from bibliome.proxnet import MENTION_PREFIX, ProximityNetwork, expand_features
from bibliome.textprep import DEFAULT_POLICY, preprocess
from bibliome.training import (
    FeatureSpace,
    ProcessedDoc,
    fit_feature_space,
    process_document,
    recognizer_for,
    vtt_from_space,
)
from bibliome.vtt import BandCutoffs, VttDecision, VttModel, classify_stems


def model_version(model: VttModel) -> str:
    blob = json.dumps(model.to_json(), sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:12]


class VttClassifier:
    """Text in, VTT decision out.  The one code path behind CLI and service."""

    def __init__(self, model: VttModel, recognizer=None, bands: BandCutoffs = BandCutoffs(), policy=DEFAULT_POLICY):
        self.model = model
        self.recognizer = recognizer
        self.bands = bands
        self.policy = policy
        self.version = model_version(model)

    @classmethod
    def from_config(cls, model: VttModel, recognizer, cfg: Config) -> "VttClassifier":
        return cls(model, recognizer, BandCutoffs(cfg.band_low, cfg.band_high))

    def classify_processed(self, doc: ProcessedDoc) -> VttDecision:
        return classify_stems(doc.stems, doc.np, self.model, self.bands)

    def classify_document(self, doc: Document) -> VttDecision:
        return self.classify_processed(process_document(doc, self.recognizer, self.policy))

    def classify_text(self, text: str) -> VttDecision:
        return self.classify_document(Document("_request", text))


LABEL_COLUMNS = ["id", "label", "p_sum", "n_sum", "np", "threshold", "margin", "confidence", "band"]


def _num(x) -> str:
    return "" if x is None else repr(float(x))


def write_labels_tsv(decisions: Mapping[str, VttDecision], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(LABEL_COLUMNS)
        for doc_id, d in decisions.items():
            w.writerow(
                [doc_id, d.label.value, _num(d.p_sum), _num(d.n_sum), d.np, _num(d.threshold), _num(d.margin), _num(d.confidence), d.band]
            )


def read_labels_tsv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh, delimiter="\t"))


def evaluation_report(decisions: Mapping[str, VttDecision], corpus: Corpus) -> dict:
    labeled = {d.id: d.label for d in corpus if d.label is not Label.UNLABELED}
    preds = {i: decisions[i].label for i in labeled}
    c = confusion(preds, labeled)
    report = {"confusion": {"tp": c.tp, "fp": c.fp, "tn": c.tn, "fn": c.fn}, "metrics": metrics(c).as_dict()}
    if c.tp + c.fn and c.tn + c.fp:
        ids = list(labeled)
        # +/-inf margins are ordered correctly by the rank-based estimator
        report["auc"] = auc([decisions[i].margin for i in ids], [labeled[i] for i in ids])
    return report


# -- full text: IPS / ISS ---------------------------------------------------------


@dataclass
class PassageRanker:
    """Ranks paragraphs, protein pairs and evidence sentences of full-text articles."""

    pair_scores: list
    sentence_feature_set: frozenset
    recognizer: object = None
    expand_threshold: float = 0.25
    expand_limit: int = 50
    policy: object = DEFAULT_POLICY

    @classmethod
    def fit(
        cls,
        pair_stats: Mapping,
        evidence_sentences: Sequence[str],
        fulltext_corpus: Iterable[Document],
        recognizer=None,
        cfg: Config = Config(),
    ) -> "PassageRanker":
        pairs = fulltext.pair_ppi_scores(pair_stats, cfg.pair_top_n)
        evidence = [preprocess(s) for s in evidence_sentences]
        corpus_stems = [preprocess(d.text) for d in fulltext_corpus]
        sfeats = fulltext.sentence_features(evidence, corpus_stems, cfg.sentence_top_n)
        return cls(pairs, frozenset(f.stem for f in sfeats), recognizer, cfg.expand_threshold, cfg.expand_limit)

    @property
    def pair_ranks(self) -> dict:
        return {s.pair: s.rank for s in self.pair_scores}

    def rank_document(self, doc: Document):
        """Return (paragraph ranks, IPS rows, ISS sentences) for one document."""
        rec = recognizer_for(self.recognizer, doc.id)
        para_stems = [preprocess(p, self.policy) for p in doc.paragraphs]
        para_mentions = [sorted(set(rec.mentions(p))) if rec is not None else [] for p in doc.paragraphs]
        ranks = fulltext.combine_ranks(
            fulltext.rank_paragraphs(doc.id, para_stems, para_mentions, self.pair_ranks, self.sentence_feature_set)
        )
        ips = []
        orders = {c: fulltext.combined_order(ranks, c) for c in (1, 2, 3)}
        pairs_by_combo = {}
        for c in (1, 2, 3):
            pairs_by_combo[c] = fulltext.extract_pairs(doc.id, doc.paragraphs, orders[c], rec) if rec is not None else []
            ips.extend((p, c) for p in pairs_by_combo[c])

        iss = []
        if rec is not None and orders[1]:
            network = ProximityNetwork.from_paragraphs(para_stems, para_mentions)
            mentions = {m for p in pairs_by_combo[1] for m in (p.mention_1, p.mention_2)}
            seeds = [MENTION_PREFIX + m for m in sorted(mentions)]
            seeds += sorted({s for m in mentions for s in preprocess(m, self.policy)})
            expanded = expand_features(network, seeds, self.expand_threshold, self.expand_limit)
            feats = {s for s in expanded if not s.startswith(MENTION_PREFIX)}
            feats |= {w for pair in self.pair_ranks for w in pair}
            iss = fulltext.rank_sentences(
                doc.id, doc.paragraphs, orders[1], rec, feats, lambda t: preprocess(t, self.policy)
            )
        return ranks, ips, iss

    def rank_corpus(self, corpus: Iterable[Document]):
        ips, iss = [], []
        for doc in corpus:
            _, doc_ips, doc_iss = self.rank_document(doc)
            ips.extend(doc_ips)
            iss.extend(doc_iss)
        return ips, iss


# -- SVD with uncertainty integration -----------------------------------------------


def _grid(spec) -> np.ndarray:
    return np.asarray(inclusive_range(*spec))


@dataclass
class SvdUiModel:
    """LSI vote classifier plus VTT variants, fused by per-document vote entropy."""

    features: FeatureSpace
    space: lsi.LsiSpace
    boundary: lsi.LsiBoundary
    vtt_models: dict
    compound: CompoundSpace
    train_matrix: object
    train_labels: tuple
    train_correct: dict
    priority: tuple = ()
    use_correctness_mask: bool = True

    @classmethod
    def fit(
        cls,
        train: Sequence[ProcessedDoc],
        vtt_params: Mapping[str, tuple] = None,
        cfg: Config = Config(),
        boundary_sets: Optional[Sequence] = None,
    ) -> "SvdUiModel":
        """Fit on labeled processed documents.

        ``vtt_params`` maps feature kind to ``(lambda0, beta)``.  The LSI
        boundary is fitted on ``boundary_sets`` (``(pi, nu, truth)`` triples)
        when given, otherwise on the training documents themselves.
        """
        if vtt_params is None:
            vtt_params = {COOCCUR: (1.0, 15.0), BIGRAM_PLUS: (1.5, 9.0)}
        feats = fit_feature_space(train, cfg.k_words)
        vocab = feats.vocabulary.stems
        mat = lsi.build_matrix([d.stems for d in train], vocab, [d.np for d in train])
        labels = tuple(d.label for d in train)
        space = lsi.fit_svd(mat, cfg.lsi_k, labels)
        truth = np.array([lab is Label.POSITIVE for lab in labels])
        train_pi, train_nu = lsi.pi_nu(mat.vectors, space)
        if boundary_sets is None:
            boundary_sets = [(train_pi, train_nu, truth)]
        boundary = lsi.fit_boundary(boundary_sets, _grid(cfg.boundary_m), _grid(cfg.boundary_b))

        vtts = {f"vtt_{kind}": vtt_from_space(feats, kind, *params, presence=cfg.presence) for kind, params in vtt_params.items()}
        correct = {"lsi": lsi.classify_lsi(train_pi, train_nu, boundary) == truth}
        for name, model in vtts.items():
            calls = np.array([classify_stems(d.stems, d.np, model).label is Label.POSITIVE for d in train])
            correct[name] = calls == truth

        compound = CompoundSpace(
            [(WORD, w) for w in vocab]
            + [(kind, p) for kind in (BIGRAM_PLUS, COOCCUR) for p in feats.pairs.get(kind, {})]
        )
        train_matrix = compound.vectorize([_compound_features(d.stems, feats) for d in train])
        priority = tuple(p for p in cfg.fusion_priority if p in correct) or tuple(correct)
        return cls(feats, space, boundary, vtts, compound, train_matrix, labels, correct, priority, cfg.fusion_correctness_mask)

    def lsi_scores(self, docs: Sequence[ProcessedDoc]):
        """(labels, pi, nu) of the LSI vote classifier alone."""
        mat = lsi.build_matrix([d.stems for d in docs], self.space.vocabulary, [d.np for d in docs], idf=self.space.idf)
        pi, nu = lsi.pi_nu(mat.vectors, self.space)
        calls = np.atleast_1d(lsi.classify_lsi(pi, nu, self.boundary))
        return [Label.POSITIVE if c else Label.NEGATIVE for c in calls], pi, nu

    def predict(self, docs: Sequence[ProcessedDoc]) -> list[FusedDecision]:
        method_labels = {"lsi": self.lsi_scores(docs)[0]}
        for name, model in self.vtt_models.items():
            method_labels[name] = [classify_stems(d.stems, d.np, model).label for d in docs]
        test_matrix = self.compound.vectorize([_compound_features(d.stems, self.features) for d in docs])
        cos = CompoundSpace.cosines(test_matrix, self.train_matrix)
        return fuse(
            [d.id for d in docs],
            cos,
            self.train_labels,
            method_labels,
            self.train_correct,
            self.priority,
            self.use_correctness_mask,
        )


def _compound_features(stems, feats: FeatureSpace) -> list:
    """Kind-tagged features, so a bigram and a co-occurrence pair stay distinct."""
    vocab = feats.vocabulary
    return [(kind, f) for kind in (WORD, BIGRAM_PLUS, COOCCUR) for f in document_features(stems, kind, vocab)]
