"""Write a synthetic workspace: labeled abstracts, a holdout set, full text,
evidence sentences and a protein lexicon.

    python scripts/make_synthetic.py --out data/synth --seed 0
"""

import argparse
import os

from bibliome.corpus import save_corpus
from bibliome.synthetic import SyntheticSpec, make_corpus, make_fulltext, make_vocabulary


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", required=True)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-docs", type=int, default=400)
    ap.add_argument("--n-fulltext", type=int, default=5)
    args = ap.parse_args(argv)

    spec = SyntheticSpec(n_docs=args.n_docs)
    os.makedirs(args.out, exist_ok=True)
    save_corpus(make_corpus(spec, seed=args.seed, prefix="a"), os.path.join(args.out, "train.jsonl"))
    save_corpus(make_corpus(spec, seed=args.seed + 1000, prefix="h"), os.path.join(args.out, "holdout.jsonl"))
    full, evidence = make_fulltext(args.n_fulltext, seed=args.seed, spec=spec)
    save_corpus(full, os.path.join(args.out, "fulltext.jsonl"))
    with open(os.path.join(args.out, "evidence.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(evidence) + "\n")
    with open(os.path.join(args.out, "lexicon.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(make_vocabulary(spec).proteins) + "\n")
    print(f"wrote synthetic workspace to {args.out}")


if __name__ == "__main__":
    main()
