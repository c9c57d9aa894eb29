"""Synthetic experiments shared by the scripts and the acceptance tests."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from bibliome.config import Config
from bibliome.evaluation import SweepCell, SweepGrid, auc, confusion, metrics, sweep
from bibliome.features import LexiconRecognizer
from bibliome.fusion import relevance_score
from bibliome.pipeline import SvdUiModel
from bibliome.synthetic import SyntheticSpec, make_corpus, make_vocabulary
from bibliome.training import fit_feature_space, labeled_docs, process_corpora, vtt_from_space
from bibliome.vtt import classify_stems

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SyntheticData:
    train: object
    additional: object
    test: object
    recognizer: LexiconRecognizer
    processed: dict


def synthetic_data(seed: int = 0, spec: SyntheticSpec = SyntheticSpec()) -> SyntheticData:
    """Training corpus, an additional corpus for the sweep and an unseen test corpus."""
    train = make_corpus(spec, seed=seed, prefix="a")
    additional = make_corpus(spec, seed=seed + 1000, prefix="h")
    test = make_corpus(spec, seed=seed + 2000, prefix="t")
    rec = LexiconRecognizer(make_vocabulary(spec).proteins)
    return SyntheticData(train, additional, test, rec, process_corpora(train, additional, test, recognizer=rec))


@dataclass(frozen=True)
class VttExperiment:
    best: SweepCell
    accuracy: float
    f_score: float
    auc: float
    n_test: int


def vtt_experiment(data: SyntheticData, cfg: Config = Config(), grid: SweepGrid = None) -> VttExperiment:
    """Sweep-select a VTT model, retrain on all training data, score the unseen test corpus."""
    grid = grid or SweepGrid.from_ranges(cfg.sweep_lambda0, cfg.sweep_beta)
    result = sweep(
        data.train,
        data.additional,
        grid,
        cfg.sweep_kinds,
        seed=cfg.seed,
        k=cfg.k_words,
        n_partitions=cfg.n_partitions,
        test_fraction=cfg.test_fraction,
        additional_fraction=cfg.additional_fraction,
        processed=data.processed,
    )
    best = result.best
    train = labeled_docs(data.processed[i] for i in data.train.ids)
    space = fit_feature_space(train, cfg.k_words, [best.feature_kind])
    model = vtt_from_space(space, best.feature_kind, best.lambda0, best.beta, cfg.presence)
    test = [data.processed[i] for i in data.test.ids]
    decisions = [classify_stems(d.stems, d.np, model) for d in test]
    truth = {d.id: d.label for d in test}
    c = confusion({d.id: dec.label for d, dec in zip(test, decisions)}, truth)
    m = metrics(c)
    a = auc([dec.margin for dec in decisions], [d.label for d in test])
    return VttExperiment(best, m.accuracy, m.f_score, a, len(test))


def svd_ui_experiment(data: SyntheticData, cfg: Config = Config()) -> dict:
    """Accuracy, F-score and AUC of LSI, each VTT variant and the fused classifier on the test corpus."""
    train = labeled_docs(data.processed[i] for i in data.train.ids)
    test = [data.processed[i] for i in data.test.ids]
    model = SvdUiModel.fit(train, cfg=cfg)
    truth = {d.id: d.label for d in test}
    labels = [d.label for d in test]
    rows = {}

    lsi_calls, pi, nu = model.lsi_scores(test)
    rows["lsi"] = (lsi_calls, np.asarray(pi) - model.boundary.m * np.asarray(nu) - model.boundary.b)
    for name, vtt in model.vtt_models.items():
        decs = [classify_stems(d.stems, d.np, vtt) for d in test]
        rows[name] = ([x.label for x in decs], [x.margin for x in decs])
    fused = model.predict(test)
    rows["svd_ui"] = ([f.label for f in fused], [relevance_score(f) for f in fused])

    out = {}
    for name, (calls, scores) in rows.items():
        m = metrics(confusion({d.id: lab for d, lab in zip(test, calls)}, truth))
        out[name] = {"accuracy": m.accuracy, "f_score": m.f_score, "auc": auc(scores, labels)}
    chosen = [f.chosen.method_id for f in fused]
    out["svd_ui"]["chosen"] = {k: chosen.count(k) for k in sorted(set(chosen))}
    return out

