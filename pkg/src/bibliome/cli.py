"""Command line interface.

    bibliome train          corpus -> VTT model JSON
    bibliome classify       model + corpus -> labels TSV
    bibliome evaluate       model + labeled corpus (or raw counts) -> metrics JSON
    bibliome sweep          rank-product parameter sweep -> TSV, prints the winner
    bibliome rank-passages  full-text corpus -> IPS and ISS TSVs
    bibliome build-network  full-text document(s) -> proximity edge lists
    bibliome serve          JSON classification service
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from bibliome.config import Config, load_config
from bibliome.corpus import CorpusError, load_corpus
from bibliome.evaluation import Confusion, SweepGrid, metrics, sweep
from bibliome.features import COOCCUR, FEATURE_KINDS, LexiconRecognizer, MentionTable, write_feature_tsv, write_s_histogram
from bibliome.fulltext import write_iss_tsv, write_ips_tsv
from bibliome.pipeline import PassageRanker, VttClassifier, evaluation_report, write_labels_tsv
from bibliome.proxnet import ProximityNetwork
from bibliome.textprep import preprocess
from bibliome.training import fit_feature_space, labeled_docs, process_corpus, recognizer_for, vtt_from_space
from bibliome.vtt import VttModel

log = logging.getLogger("bibliome")


class CliError(Exception):
    pass


def _existing(path: str) -> str:
    if path is not None and not os.path.exists(path):
        raise CliError(f"file not found: {path}")
    return path


def _recognizer(args):
    if getattr(args, "mentions", None):
        return MentionTable.from_jsonl(_existing(args.mentions))
    if getattr(args, "lexicon", None):
        return LexiconRecognizer.from_file(_existing(args.lexicon))
    return None


def _config(args) -> Config:
    cfg = load_config(_existing(args.config)) if args.config else Config()
    if args.seed is not None:
        cfg = cfg.updated(seed=args.seed)
    return cfg


def _load_model(path) -> VttModel:
    return VttModel.load(_existing(path))


def cmd_train(args, cfg: Config) -> int:
    corpus = load_corpus(_existing(args.corpus))
    kind = args.kind or cfg.feature_kind
    lambda0 = cfg.lambda0 if args.lambda0 is None else args.lambda0
    beta = cfg.beta if args.beta is None else args.beta
    docs = labeled_docs(process_corpus(corpus, _recognizer(args)))
    space = fit_feature_space(docs, cfg.k_words, [kind])
    model = vtt_from_space(space, kind, lambda0, beta, cfg.presence)
    model.save(args.out)
    if args.features_out:
        write_feature_tsv(space.stats(kind), args.features_out)
    if args.histogram_out:
        write_s_histogram(space.words, args.histogram_out)
    print(f"trained {kind} model on {len(docs)} documents ({len(model.weights)} features) -> {args.out}")
    return 0


def cmd_classify(args, cfg: Config) -> int:
    model = _load_model(args.model)
    corpus = load_corpus(_existing(args.corpus))
    clf = VttClassifier.from_config(model, _recognizer(args), cfg)
    decisions = {d.id: clf.classify_document(d) for d in corpus}
    write_labels_tsv(decisions, args.out)
    print(f"classified {len(decisions)} documents -> {args.out}")
    return 0


def cmd_evaluate(args, cfg: Config) -> int:
    if args.confusion:
        tp, fp, tn, fn = args.confusion
        c = Confusion(tp, fp, tn, fn)
        report = {"confusion": {"tp": tp, "fp": fp, "tn": tn, "fn": fn}, "metrics": metrics(c).as_dict()}
    else:
        if not (args.model and args.corpus):
            raise CliError("evaluate needs --model and --corpus, or --confusion TP FP TN FN")
        model = _load_model(args.model)
        corpus = load_corpus(_existing(args.corpus))
        clf = VttClassifier.from_config(model, _recognizer(args), cfg)
        report = evaluation_report({d.id: clf.classify_document(d) for d in corpus}, corpus)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def cmd_sweep(args, cfg: Config) -> int:
    corpus = load_corpus(_existing(args.corpus))
    holdout = load_corpus(_existing(args.holdout))
    grid = SweepGrid.from_ranges(cfg.sweep_lambda0, cfg.sweep_beta)
    kinds = tuple(args.kinds.split(",")) if args.kinds else cfg.sweep_kinds
    result = sweep(
        corpus,
        holdout,
        grid,
        kinds,
        seed=cfg.seed,
        recognizer=_recognizer(args),
        k=cfg.k_words,
        n_partitions=cfg.n_partitions,
        test_fraction=cfg.test_fraction,
        additional_fraction=cfg.additional_fraction,
    )
    result.write_tsv(args.out)
    b = result.best
    print(f"best: lambda0={b.lambda0} beta={b.beta} kind={b.feature_kind} R={b.R} "
          f"(F={b.mean_f_kfold:.4f}/{b.mean_f_additional:.4f} acc={b.mean_acc_kfold:.4f}/{b.mean_acc_additional:.4f})")
    return 0


def cmd_rank_passages(args, cfg: Config) -> int:
    recognizer = _recognizer(args)
    abstracts = load_corpus(_existing(args.abstracts))
    full = load_corpus(_existing(args.fulltext))
    with open(_existing(args.evidence), encoding="utf-8") as fh:
        evidence = [line.strip() for line in fh if line.strip()]
    docs = labeled_docs(process_corpus(abstracts, recognizer))
    space = fit_feature_space(docs, cfg.k_words, [COOCCUR])
    ranker = PassageRanker.fit(space.pairs[COOCCUR], evidence, full, recognizer, cfg)
    ips, iss = ranker.rank_corpus(full)
    os.makedirs(args.out_dir, exist_ok=True)
    write_ips_tsv(ips, os.path.join(args.out_dir, "ips.tsv"))
    write_iss_tsv(iss, os.path.join(args.out_dir, "iss.tsv"))
    print(f"{len(ips)} pair rows, {len(iss)} passages -> {args.out_dir}")
    return 0


def cmd_build_network(args, cfg: Config) -> int:
    corpus = load_corpus(_existing(args.corpus))
    recognizer = _recognizer(args)
    if args.id and args.id not in corpus:
        raise CliError(f"no document with id {args.id}")
    docs = [corpus.get(args.id)] if args.id else list(corpus)
    single = len(docs) == 1 and not os.path.isdir(args.out)
    if not single:
        os.makedirs(args.out, exist_ok=True)
    for doc in docs:
        stems = [preprocess(p) for p in doc.paragraphs]
        rec = recognizer_for(recognizer, doc.id) if recognizer is not None else None
        mentions = [sorted(set(rec.mentions(p))) for p in doc.paragraphs] if rec is not None else None
        net = ProximityNetwork.from_paragraphs(stems, mentions)
        path = args.out if single else os.path.join(args.out, f"{doc.id}.tsv")
        net.write_tsv(path)
    print(f"wrote {len(docs)} network(s) -> {args.out}")
    return 0


def cmd_serve(args, cfg: Config) -> int:
    import uvicorn

    from bibliome.service import create_app

    clf = VttClassifier.from_config(_load_model(args.model), _recognizer(args), cfg)
    uvicorn.run(create_app(clf, cfg.max_text_bytes), host=args.host, port=args.port)
    return 0


def _add_recognizer(p):
    p.add_argument("--lexicon", help="protein name lexicon, one name per line")
    p.add_argument("--mentions", help="precomputed mentions JSONL {id, mentions}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bibliome", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--seed", type=int, default=None, help="random seed (overrides config)")
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a VTT model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kind", choices=FEATURE_KINDS)
    p.add_argument("--lambda0", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--features-out", help="write the feature table (TSV)")
    p.add_argument("--histogram-out", help="write ranked S scores of all words (TSV)")
    _add_recognizer(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="label a corpus with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    _add_recognizer(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="metrics for a model on a labeled corpus")
    p.add_argument("--model")
    p.add_argument("--corpus")
    p.add_argument("--confusion", type=int, nargs=4, metavar=("TP", "FP", "TN", "FN"))
    p.add_argument("--out")
    _add_recognizer(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="rank-product sweep over lambda0, beta and feature kind")
    p.add_argument("--corpus", required=True)
    p.add_argument("--holdout", required=True, help="additional labeled corpus for the second protocol")
    p.add_argument("--out", required=True)
    p.add_argument("--kinds", help="comma-separated feature kinds")
    _add_recognizer(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rank-passages", help="IPS pair and ISS passage ranking for full text")
    p.add_argument("--abstracts", required=True, help="labeled abstracts for pair features")
    p.add_argument("--fulltext", required=True)
    p.add_argument("--evidence", required=True, help="evidence sentences, one per line")
    p.add_argument("--out-dir", required=True)
    _add_recognizer(p)
    p.set_defaults(func=cmd_rank_passages)

    p = sub.add_parser("build-network", help="export word proximity networks")
    p.add_argument("--corpus", required=True)
    p.add_argument("--id", help="document id (default: all documents)")
    p.add_argument("--out", required=True, help="TSV path for one document, directory otherwise")
    _add_recognizer(p)
    p.set_defaults(func=cmd_build_network)

    p = sub.add_parser("serve", help="run the JSON classification service")
    p.add_argument("--model", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    _add_recognizer(p)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, _config(args))
    except (CliError, CorpusError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
