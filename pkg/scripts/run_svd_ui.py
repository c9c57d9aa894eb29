"""LSI vote classifier, VTT variants and their uncertainty-based integration
on synthetic data.  Prints one row per method.

    python scripts/run_svd_ui.py --seed 0
"""

import argparse

from bibliome.config import Config
from bibliome.experiments import svd_ui_experiment, synthetic_data


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lsi-k", type=int, default=100)
    ap.add_argument("--no-mask", action="store_true", help="votes from all training documents")
    args = ap.parse_args(argv)

    cfg = Config(seed=args.seed, lsi_k=args.lsi_k, fusion_correctness_mask=not args.no_mask)
    res = svd_ui_experiment(synthetic_data(args.seed), cfg)
    print(f"{'method':<18}{'accuracy':>10}{'F':>10}{'AUC':>10}")
    for name, row in res.items():
        print(f"{name:<18}{row['accuracy']:>10.4f}{row['f_score']:>10.4f}{row['auc']:>10.4f}")
    print("fused choices:", res["svd_ui"]["chosen"])


if __name__ == "__main__":
    main()
