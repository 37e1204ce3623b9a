#!/usr/bin/env python3
"""Cross-validated error rates for every bundled dataset and method.

Writes results/<dataset>.csv and results/<dataset>.json via the CLI, then
prints a compact summary table. Run scripts/fetch_datasets.py first if the
data/ CSVs are missing.
"""

import argparse
import json
from pathlib import Path

from dte.cli import main as dte_main

ROOT = Path(__file__).resolve().parent.parent
DATASETS = [
    ("iris", ROOT / "data" / "iris.csv", "species"),
    ("wine", ROOT / "data" / "wine.csv", "cultivar"),
    ("breast_cancer", ROOT / "data" / "breast_cancer.csv", "diagnosis"),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--methods", default="dte-1,dte-3,tree")
    parser.add_argument("--replicates", type=int, default=10)
    parser.add_argument("--folds", type=int, default=5)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out-dir", default=ROOT / "results")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    summaries = []
    for name, path, label in DATASETS:
        if not path.exists():
            raise SystemExit(f"{path} missing; run scripts/fetch_datasets.py first")
        prefix = out_dir / name
        code = dte_main(["benchmark", "--data", str(path), "--label", label,
                         "--methods", args.methods,
                         "--replicates", str(args.replicates),
                         "--folds", str(args.folds), "--seed", str(args.seed),
                         "--out-prefix", str(prefix)])
        if code != 0:
            raise SystemExit(code)
        summaries.append(json.loads((out_dir / f"{name}.json").read_text()))

    print()
    print(f"{'dataset':<15}{'method':<8}{'error %':>10}{'std %':>8}"
          f"{'train ms':>10}{'test ms':>9}")
    for s in summaries:
        for m in s["methods"]:
            print(f"{s['dataset']:<15}{m['method']:<8}"
                  f"{100 * m['mean_error']:>10.2f}{100 * m['std_error']:>8.2f}"
                  f"{1e3 * m['mean_train_seconds']:>10.1f}"
                  f"{1e3 * m['mean_test_seconds']:>9.2f}")


if __name__ == "__main__":
    main()
