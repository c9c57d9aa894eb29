"""Acceptance criteria.  Each test records a pass/fail line in the terminal summary."""

import math
import time

import numpy as np
from fastapi.testclient import TestClient

import conftest
from bibliome.cli import main
from bibliome.corpus import Label, save_corpus
from bibliome.evaluation import Confusion, SweepGrid, auc, metrics, sweep
from bibliome.features import FEATURE_KINDS, WORD, LexiconRecognizer
from bibliome.fulltext import ppi_score
from bibliome.fusion import VoteDistribution, entropy, vote_probs
from bibliome.lsi import build_matrix, fit_svd, pi_nu
from bibliome.pipeline import VttClassifier, read_labels_tsv
from bibliome.proxnet import ProximityNetwork, expand_features
from bibliome.service import create_app
from bibliome.synthetic import make_fulltext
from bibliome.training import fit_feature_space, labeled_docs, vtt_from_space
from bibliome.vtt import BandCutoffs, TermWeight, VttModel, classify_stems, confidence

from oracles import auc_oracle, pi_nu_oracle, vote_oracle, vtt_oracle, wpp_oracle
from randgen import STEMS, random_docs, random_labels, random_lsi_instance

P, N = Label.POSITIVE, Label.NEGATIVE


def record(n, desc, ok, detail):
    conftest.ACCEPTANCE_RESULTS[n] = (bool(ok), desc, detail)
    assert ok, f"criterion {n} ({desc}): {detail}"


def _lsi_queries(rng):
    """Random corpus plus in-span queries: training docs, and unseen docs at full column rank."""
    while True:
        train, train_np, positive, test, test_np = random_lsi_instance(rng)
        if any(train) or any(train_np):
            break
    vocab = sorted({w for d in train for w in d})
    mat = build_matrix(train, vocab, train_np)
    space = fit_svd(mat, k=mat.vectors.shape[1], labels=[P if p else N for p in positive])
    queries, q_np = list(train), list(train_np)
    if space.k == mat.vectors.shape[1]:
        queries += test
        q_np += test_np
    pi, nu = pi_nu(build_matrix(queries, mat.vocabulary, q_np, idf=mat.idf).vectors, space)
    _, expected = pi_nu_oracle(train, train_np, positive, queries, q_np)
    return float(np.max(np.abs(np.column_stack([pi, nu]) - np.asarray(expected))))


def test_01_metric_arithmetic():
    t0 = time.perf_counter()
    m = metrics(Confusion(tp=323, fp=133, tn=242, fn=52))
    elapsed = time.perf_counter() - t0
    printed = {"precision": 0.71, "recall": 0.86, "accuracy": 0.75, "f_score": 0.78, "error_rate": 0.25}
    worst = max(abs(getattr(m, k) - v) for k, v in printed.items())
    record(1, "metric arithmetic on reference counts", worst <= 0.005 and elapsed < 1.0,
           f"max deviation {worst:.4f}, {elapsed * 1000:.2f} ms")


def test_02_threshold_at_beta():
    rng = np.random.default_rng(2)
    bad = 0
    for _ in range(1000):
        lambda0, beta = float(rng.uniform(0, 10)), float(rng.uniform(1, 50))
        model = VttModel({}, lambda0, beta, WORD)
        bad += model.threshold(beta) != lambda0
    record(2, "T = lambda0 when np = beta", bad == 0, f"{bad}/1000 mismatches")


def test_03_ppi_axis_identity():
    rng = np.random.default_rng(3)
    values = rng.uniform(0, 1, 1000)
    bad = sum(ppi_score(float(p), 0.0) != float(p) for p in values)
    record(3, "ppi(p_tp, 0) = p_tp", bad == 0, f"{bad}/1000 mismatches")


def test_04_unit_circle_weights(synth):
    docs = labeled_docs(synth.processed[i] for i in synth.train.ids)
    space = fit_feature_space(docs, 650)
    worst, count = 0.0, 0
    for kind in FEATURE_KINDS:
        model = vtt_from_space(space, kind, 1.0, 15.0)
        for w in model.weights.values():
            worst = max(worst, abs(w.cos_alpha ** 2 + w.sin_alpha ** 2 - 1))
            count += 1
    record(4, "cos^2 + sin^2 = 1", worst <= 1e-12 and count > 0, f"{count} features, max error {worst:.1e}")


def test_05_entropy_bounds():
    extremes = entropy(VoteDistribution(1.0, 0.0)) == 0.0 and entropy(VoteDistribution(0.5, 0.5)) == 1.0
    rng = np.random.default_rng(5)
    us = [entropy(VoteDistribution(float(p), 1 - float(p))) for p in rng.uniform(0, 1, 10_000)]
    inside = all(0 <= u <= 1 for u in us)
    record(5, "entropy extremes and bounds", extremes and inside,
           f"U(1,0)=0 and U(.5,.5)=1: {extremes}; 10000 in [0,1]: {inside}")


def _vtt_case(rng):
    n_feats = int(rng.integers(1, 11))
    counts = rng.integers(0, 21, size=(n_feats, 2))
    counts[counts.sum(axis=1) == 0, 0] = 1
    weights = {STEMS[i]: (counts[i, 0] / 20, counts[i, 1] / 20) for i in range(n_feats)}
    doc = random_docs(rng, 1, 10, max_len=20)[0]
    np_count, lambda0, beta = int(rng.integers(0, 30)), float(rng.uniform(0, 10)), float(rng.uniform(1, 50))
    model = VttModel({f: TermWeight(f, *_unit(a, b)) for f, (a, b) in weights.items()}, lambda0, beta, WORD, tuple(weights))
    d = classify_stems(doc, np_count, model)
    lab, p, n, t = vtt_oracle(doc, weights, np_count, lambda0, beta)
    if d.label.value != lab:
        return math.inf
    return max(abs(d.p_sum - p), abs(d.n_sum - n), abs(d.threshold - t))


def _unit(a, b):
    r = math.hypot(a, b)
    return a / r, b / r


def _vote_case(rng):
    n = int(rng.integers(1, 21))
    cos = rng.uniform(-1, 1, n)
    positive = rng.random(n) < 0.5
    mask = rng.random(n) < 0.7 if rng.random() < 0.5 else None
    d = vote_probs(cos, [P if x else N for x in positive], mask)
    e = vote_oracle(cos.tolist(), positive.tolist(), None if mask is None else mask.tolist())
    return max(abs(d.rho_tp - e[0]), abs(d.rho_tn - e[1]))


def _wpp_case(rng):
    n_par = int(rng.integers(1, 11))
    paras = [set(rng.choice(STEMS, size=rng.integers(0, 7))) for _ in range(n_par)]
    if not any(paras):
        paras[0] = {STEMS[0]}
    net = ProximityNetwork.from_paragraphs([sorted(p) for p in paras])
    worst = 0.0
    for i, a in enumerate(net.nodes):
        for b in net.nodes[i:]:
            worst = max(worst, abs(net.weight(a, b) - wpp_oracle(paras, a, b)))
    return worst


def _auc_case(rng):
    n = int(rng.integers(2, 21))
    positive = random_labels(rng, n)
    scores = rng.integers(-3, 4, n) if rng.random() < 0.5 else rng.normal(size=n)
    return abs(auc(list(scores), [P if x else N for x in positive]) - auc_oracle(list(scores), list(positive)))


def test_06_oracles():
    cases = {"vtt": _vtt_case, "pi_nu": _lsi_queries, "vote_probs": _vote_case, "wpp": _wpp_case, "auc": _auc_case}
    t0 = time.perf_counter()
    worst = {}
    for name, case in cases.items():
        rng = np.random.default_rng(6)
        worst[name] = max(case(rng) for _ in range(500))
    elapsed = time.perf_counter() - t0
    ok = all(w <= 1e-8 for w in worst.values()) and elapsed < 60
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    record(6, "brute-force oracles (500 instances each)", ok, f"{detail}; {elapsed:.1f} s")


def test_07_synthetic_end_to_end(synth):
    from bibliome.experiments import vtt_experiment

    t0 = time.perf_counter()
    first = vtt_experiment(synth)
    elapsed = time.perf_counter() - t0
    second = vtt_experiment(synth)
    ok = first.accuracy >= 0.9 and first.auc >= 0.95 and first == second and elapsed < 120
    b = first.best
    record(7, "synthetic end-to-end VTT", ok,
           f"acc {first.accuracy:.4f}, AUC {first.auc:.4f} on {first.n_test} docs, "
           f"{b.feature_kind} lambda0={b.lambda0} beta={b.beta}, deterministic {first == second}, {elapsed:.1f} s")


def _ranks(values):
    return [1 + sum(1 for w in values if w > v) for v in values]


def test_08_sweep_contract(synth):
    grid = SweepGrid((0.5, 1.0, 1.5), (5.0, 15.0, 25.0))
    kinds = ("word", "bigram_plus", "cooccur")
    res = sweep(synth.train, synth.additional, grid, kinds, seed=8, processed=synth.processed)
    cols = [[getattr(c, a) for c in res.cells] for a in ("mean_f_kfold", "mean_acc_kfold", "mean_f_additional", "mean_acc_additional")]
    ranks = [_ranks(col) for col in cols]
    recomputed = [r1 * r2 * r3 * r4 for r1, r2, r3, r4 in zip(*ranks)]
    products_ok = recomputed == [c.R for c in res.cells]
    minimal = res.best.R == min(recomputed)
    record(8, "sweep returns minimal rank product", products_ok and minimal and len(res.cells) == 27,
           f"best R={res.best.R} ({res.best.feature_kind} lambda0={res.best.lambda0} beta={res.best.beta}), "
           f"recomputed products match: {products_ok}")


def test_09_full_rank_lsi():
    rng = np.random.default_rng(9)
    worst = max(_lsi_queries(rng) for _ in range(100))
    record(9, "full-rank LSI equals direct cosines", worst <= 1e-8, f"100 corpora, max error {worst:.1e}")


def _write_pipeline_inputs(d, synth):
    save_corpus(synth.train, d / "train.jsonl")
    save_corpus(synth.test, d / "test.jsonl")
    full, evidence = make_fulltext(3, seed=10)
    save_corpus(full, d / "full.jsonl")
    (d / "evidence.txt").write_text("\n".join(evidence) + "\n")
    (d / "lexicon.txt").write_text("\n".join(sorted(synth.recognizer.lexicon)) + "\n")


def _pipeline_run(d, out):
    lex = ["--lexicon", str(d / "lexicon.txt")]
    out.mkdir()
    codes = [
        main(["--seed", "10", "train", "--corpus", str(d / "train.jsonl"), "--out", str(out / "model.json"),
              "--features-out", str(out / "features.tsv"), *lex]),
        main(["--seed", "10", "classify", "--model", str(out / "model.json"), "--corpus", str(d / "test.jsonl"),
              "--out", str(out / "labels.tsv"), *lex]),
        main(["--seed", "10", "rank-passages", "--abstracts", str(d / "train.jsonl"), "--fulltext", str(d / "full.jsonl"),
              "--evidence", str(d / "evidence.txt"), "--out-dir", str(out / "passages"), *lex]),
    ]
    files = sorted(p for p in out.rglob("*.tsv"))
    return codes, {p.relative_to(out).as_posix(): p.read_bytes() for p in files}


def test_10_pipeline_determinism(synth, tmp_path):
    _write_pipeline_inputs(tmp_path, synth)
    codes_a, a = _pipeline_run(tmp_path, tmp_path / "run_a")
    codes_b, b = _pipeline_run(tmp_path, tmp_path / "run_b")
    ok = codes_a == codes_b == [0, 0, 0] and a == b and len(a) == 4
    record(10, "pipeline determinism", ok, f"{len(a)} TSV files, identical: {a == b}")


def _edge_classifier(cos, sin, lambda0, beta):
    model = VttModel({"kinas": TermWeight("kinas", cos, sin)}, lambda0, beta, WORD, ("kinas",))
    return VttClassifier(model, LexiconRecognizer(["ABC1"]))


def test_11_service_cli_coherence(synth, tmp_path):
    _write_pipeline_inputs(tmp_path, synth)
    lex = ["--lexicon", str(tmp_path / "lexicon.txt")]
    assert main(["train", "--corpus", str(tmp_path / "train.jsonl"), "--out", str(tmp_path / "m.json"), *lex]) == 0
    fixture = synth.test.subset(synth.test.ids[:50])
    save_corpus(fixture, tmp_path / "fixture.jsonl")
    assert main(["classify", "--model", str(tmp_path / "m.json"), "--corpus", str(tmp_path / "fixture.jsonl"),
                 "--out", str(tmp_path / "labels.tsv"), *lex]) == 0
    cli = {r["id"]: r for r in read_labels_tsv(tmp_path / "labels.tsv")}
    client = TestClient(create_app(VttClassifier(VttModel.load(tmp_path / "m.json"), synth.recognizer)))
    mismatches = 0
    for doc in fixture:
        body = client.post("/classify", json={"text": doc.text}).json()
        row = cli[doc.id]
        c = None if row["confidence"] == "" else float(row["confidence"])
        mismatches += (body["label"], body["confidence"], body["band"]) != (row["label"], c, row["band"])

    # exact band edges through the service: C = 1/10 at T = 10, C = 1/2 at T = 1/2
    bands = BandCutoffs()
    direct = (confidence(11.0, 10.0, bands)[:2], confidence(0.75, 0.5, bands)[:2])
    low = TestClient(create_app(_edge_classifier(0.6875, 0.0625, 9.0, 15.0))).post("/classify", json={"text": "kinase"}).json()
    high = TestClient(create_app(_edge_classifier(0.375, 0.5, 0.0, 2.0))).post("/classify", json={"text": "ABC1 kinase"}).json()
    edges_ok = (
        direct == ((0.1, "low"), (0.5, "high"))
        and (low["confidence"], low["band"]) == (0.1, "low")
        and (high["confidence"], high["band"]) == (0.5, "high")
    )
    record(11, "service and CLI agree", mismatches == 0 and len(fixture) == 50 and edges_ok,
           f"{mismatches}/50 mismatches, band edges exact: {edges_ok}")


def test_12_proximity_network():
    rng = np.random.default_rng(12)
    vocab = [f"s{i}" for i in range(15)]
    failures = 0
    for _ in range(1000):
        paras = [list(rng.choice(vocab, size=rng.integers(0, 8))) for _ in range(int(rng.integers(1, 11)))]
        if not any(paras):
            paras[0] = [vocab[0]]
        w = ProximityNetwork.from_paragraphs(paras).weights
        failures += not (np.array_equal(w, w.T) and np.all(np.diag(w) == 1.0) and np.all((w >= 0) & (w <= 1)))
    monotone = 0
    thresholds = np.linspace(0.05, 1.0, 20)
    for _ in range(100):
        paras = [list(rng.choice(vocab, size=rng.integers(1, 8))) for _ in range(int(rng.integers(2, 11)))]
        net = ProximityNetwork.from_paragraphs(paras)
        seeds = list(rng.choice(net.nodes, size=min(2, len(net.nodes)), replace=False))
        sets = [set(expand_features(net, seeds, t, limit=len(net.nodes))) for t in thresholds]
        monotone += all(hi <= lo for lo, hi in zip(sets, sets[1:]))
    record(12, "proximity network properties", failures == 0 and monotone == 100,
           f"{1000 - failures}/1000 networks valid, {monotone}/100 expansions monotone")
