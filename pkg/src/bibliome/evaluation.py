"""Classification metrics, AUC, and the rank-product parameter sweep."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from bibliome.corpus import Corpus, Label, make_partitions
from bibliome.features import FEATURE_KINDS
from bibliome.training import ProcessedDoc, fit_feature_space, process_corpora, vtt_from_space
from bibliome.vtt import classify_batch, score

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Confusion:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(predictions: Mapping[str, Label], truth: Mapping[str, Label]) -> Confusion:
    """Counts over documents present in both maps; ids must match exactly."""
    missing_pred = sorted(set(truth) - set(predictions))
    missing_truth = sorted(set(predictions) - set(truth))
    if missing_pred or missing_truth:
        raise ValueError(f"id mismatch: no prediction for {missing_pred}, no label for {missing_truth}")
    tp = fp = tn = fn = 0
    for doc_id, pred in predictions.items():
        positive_truth = truth[doc_id] is Label.POSITIVE
        if pred is Label.POSITIVE:
            tp += positive_truth
            fp += not positive_truth
        else:
            fn += positive_truth
            tn += not positive_truth
    return Confusion(tp, fp, tn, fn)


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    accuracy: float
    f_score: float
    error_rate: float
    fp_rate: float
    tp_rate: float
    flags: tuple = ()

    def as_dict(self) -> dict:
        d = asdict(self)
        d["flags"] = list(self.flags)
        return d


def _ratio(num, den, name, flags):
    if den == 0:
        flags.append(name)
        return 0.0
    return num / den


def metrics(c: Confusion) -> Metrics:
    """Standard rates; a zero denominator yields 0 and the metric's name in ``flags``."""
    flags: list = []
    precision = _ratio(c.tp, c.tp + c.fp, "precision", flags)
    recall = _ratio(c.tp, c.tp + c.fn, "recall", flags)
    accuracy = _ratio(c.tp + c.tn, c.total, "accuracy", flags)
    f = _ratio(2 * precision * recall, precision + recall, "f_score", flags)
    error = 0.0 if c.total == 0 else 1.0 - accuracy
    if c.total == 0:
        flags.append("error_rate")
    fp_rate = _ratio(c.fp, c.fp + c.tn, "fp_rate", flags)
    return Metrics(precision, recall, accuracy, f, error, fp_rate, recall, tuple(flags))


def auc(scores: Sequence[float], labels: Sequence[Label]) -> float:
    """Mann-Whitney AUC: P(score_pos > score_neg), ties counting one half."""
    s = np.asarray(scores, dtype=float)
    pos = np.array([lab is Label.POSITIVE for lab in labels])
    neg = np.array([lab is Label.NEGATIVE for lab in labels])
    n_pos, n_neg = int(pos.sum()), int(neg.sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative")
    keep = pos | neg
    ranks = rankdata(s[keep], method="average")
    rank_sum = ranks[pos[keep]].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


# -- parameter sweep ------------------------------------------------------------


def inclusive_range(start: float, stop: float, step: float) -> tuple:
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 10) for i in range(n))


@dataclass(frozen=True)
class SweepGrid:
    lambda0s: tuple
    betas: tuple

    @classmethod
    def from_ranges(cls, lambda0=(0.0, 10.0, 0.25), beta=(1.0, 50.0, 2.0)) -> "SweepGrid":
        return cls(inclusive_range(*lambda0), inclusive_range(*beta))

    def __len__(self):
        return len(self.lambda0s) * len(self.betas)


@dataclass(frozen=True)
class SweepCell:
    lambda0: float
    beta: float
    feature_kind: str
    mean_f_kfold: float
    mean_acc_kfold: float
    mean_f_additional: float
    mean_acc_additional: float
    r_f_k: int = 0
    r_a_k: int = 0
    r_f_t: int = 0
    r_a_t: int = 0
    R: int = 0


@dataclass
class SweepResult:
    best: SweepCell
    cells: list = field(default_factory=list)

    def write_tsv(self, path) -> None:
        write_sweep_tsv(self.cells, path)


def competition_ranks(values: Sequence[float]) -> list[int]:
    """Rank 1 for the largest value; equal values share the smallest rank."""
    return [int(r) for r in rankdata(-np.asarray(values, dtype=float), method="min")]


@dataclass(frozen=True)
class _Evidence:
    """Per-kind (P, N) for the test documents of one partition."""

    p: Mapping
    n: Mapping
    np: np.ndarray
    truth: np.ndarray


def _partition_evidence(train: Sequence[ProcessedDoc], test: Sequence[ProcessedDoc], k: int, kinds) -> _Evidence:
    space = fit_feature_space(train, k, kinds)
    p, n = {}, {}
    for kind in kinds:
        model = vtt_from_space(space, kind, 1.0, 1.0)
        sums = [score(model.features_of(d.stems), model) for d in test]
        p[kind] = np.array([s[0] for s in sums])
        n[kind] = np.array([s[1] for s in sums])
    return _Evidence(p, n, np.array([d.np for d in test], dtype=float), np.array([d.label is Label.POSITIVE for d in test]))


def _mean_f_acc(pred: np.ndarray, truth: np.ndarray):
    """pred: (L, B, n) booleans -> F-score and accuracy arrays of shape (L, B)."""
    tp = (pred & truth).sum(axis=-1)
    fp = (pred & ~truth).sum(axis=-1)
    fn = (~pred & truth).sum(axis=-1)
    acc = (truth.size - fp - fn) / truth.size
    prec = np.divide(tp, tp + fp, out=np.zeros(tp.shape), where=(tp + fp) > 0)
    rec = np.divide(tp, tp + fn, out=np.zeros(tp.shape), where=(tp + fn) > 0)
    f = np.divide(2 * prec * rec, prec + rec, out=np.zeros(tp.shape), where=(prec + rec) > 0)
    return f, acc


def sweep(
    corpus: Corpus,
    additional: Corpus,
    grid: SweepGrid,
    feature_kinds: Sequence[str] = FEATURE_KINDS,
    seed: int = 0,
    recognizer=None,
    k: int = 650,
    n_partitions: int = 8,
    test_fraction: float = 0.25,
    additional_fraction: float = 0.5,
    processed: Optional[Mapping[str, ProcessedDoc]] = None,
) -> SweepResult:
    """Rank-product selection of (lambda0, beta, feature kind).

    Every cell is scored by mean F-score and accuracy over ``n_partitions``
    k-fold partitions of ``corpus`` and over ``n_partitions`` additional-data
    partitions (train on all of ``corpus``, test on balanced samples of
    ``additional``).  Cells are ranked on each of the four means and the cell
    with the smallest product of ranks wins; ties go to the higher mean
    F-score, then the smaller (lambda0, beta), then feature-kind order.
    """
    if len(grid) == 0 or not feature_kinds:
        raise ValueError("empty sweep grid")
    kinds = tuple(feature_kinds)
    if processed is None:
        processed = process_corpora(corpus, additional, recognizer=recognizer)
    protocols = {
        "kfold": make_partitions(corpus, n_partitions, test_fraction, seed),
        "additional": make_partitions(corpus, n_partitions, additional_fraction, seed + 1, holdout=additional),
    }
    lam = np.asarray(grid.lambda0s, dtype=float)
    beta = np.asarray(grid.betas, dtype=float)
    means = {}
    for name, parts in protocols.items():
        f_sum = {kind: np.zeros((lam.size, beta.size)) for kind in kinds}
        a_sum = {kind: np.zeros((lam.size, beta.size)) for kind in kinds}
        for part in parts:
            train = [processed[i] for i in sorted(part.train)]
            test = [processed[i] for i in sorted(part.test)]
            ev = _partition_evidence(train, test, k, kinds)
            for kind in kinds:
                pred = classify_batch(ev.p[kind], ev.n[kind], ev.np, lam, beta)
                f, acc = _mean_f_acc(pred, ev.truth)
                f_sum[kind] += f
                a_sum[kind] += acc
        means[name] = {kind: (f_sum[kind] / len(parts), a_sum[kind] / len(parts)) for kind in kinds}
        log.info("sweep: %s protocol done (%d partitions)", name, len(parts))

    cells = []
    for kind in kinds:
        fk, ak = means["kfold"][kind]
        ft, at = means["additional"][kind]
        for i, l0 in enumerate(grid.lambda0s):
            for j, b in enumerate(grid.betas):
                cells.append(SweepCell(l0, b, kind, float(fk[i, j]), float(ak[i, j]), float(ft[i, j]), float(at[i, j])))
    return _rank_cells(cells, kinds)


def _rank_cells(cells: list, kinds: Sequence[str]) -> SweepResult:
    r_fk = competition_ranks([c.mean_f_kfold for c in cells])
    r_ak = competition_ranks([c.mean_acc_kfold for c in cells])
    r_ft = competition_ranks([c.mean_f_additional for c in cells])
    r_at = competition_ranks([c.mean_acc_additional for c in cells])
    ranked = []
    for c, a, b, d, e in zip(cells, r_fk, r_ak, r_ft, r_at):
        vals = {f.name: getattr(c, f.name) for f in fields(c)}
        vals.update(r_f_k=a, r_a_k=b, r_f_t=d, r_a_t=e, R=a * b * d * e)
        ranked.append(SweepCell(**vals))
    kind_order = {k: i for i, k in enumerate(kinds)}
    best = min(
        ranked,
        key=lambda c: (
            c.R,
            -(c.mean_f_kfold + c.mean_f_additional) / 2,
            c.lambda0,
            c.beta,
            kind_order[c.feature_kind],
        ),
    )
    return SweepResult(best, ranked)


SWEEP_COLUMNS = [f.name for f in fields(SweepCell)]


def write_sweep_tsv(cells: Sequence[SweepCell], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for c in cells:
            w.writerow([repr(v) if isinstance(v, float) else v for v in (getattr(c, k) for k in SWEEP_COLUMNS)])


def read_sweep_tsv(path) -> list[SweepCell]:
    types = {f.name: f.type for f in fields(SweepCell)}
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh, delimiter="\t"):
            vals = {}
            for k, v in row.items():
                t = types[k]
                vals[k] = float(v) if t == "float" else int(v) if t == "int" else v
            out.append(SweepCell(**vals))
    return out
