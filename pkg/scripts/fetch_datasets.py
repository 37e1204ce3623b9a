#!/usr/bin/env python3
"""Materialize the benchmark datasets as local CSV files under data/.

Uses scikit-learn's bundled copies (iris, wine, and the Wisconsin
diagnostic breast-cancer table), so no network access is needed. The
package itself never imports sklearn; this script only regenerates the
CSVs checked into data/.
"""

import argparse
from pathlib import Path

try:
    from sklearn import datasets
except ImportError:
    raise SystemExit("scikit-learn is required to regenerate the CSVs "
                     "(pip install scikit-learn)")


def write_csv(path: Path, data, feature_names, target_names, label_column):
    rows = []
    header = [n.replace(" ", "_").replace("_(cm)", "") for n in feature_names]
    rows.append(",".join(header + [label_column]))
    for x, y in zip(data.data, data.target):
        rows.append(",".join(repr(float(v)) for v in x)
                    + f",{target_names[y]}")
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"wrote {path} ({len(data.data)} rows, {len(header)} features)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default=Path(__file__).resolve().parent.parent / "data")
    args = parser.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    iris = datasets.load_iris()
    write_csv(out / "iris.csv", iris, iris.feature_names,
              list(iris.target_names), "species")

    wine = datasets.load_wine()
    write_csv(out / "wine.csv", wine, wine.feature_names,
              [f"class_{n}" for n in wine.target_names], "cultivar")

    cancer = datasets.load_breast_cancer()
    write_csv(out / "breast_cancer.csv", cancer, cancer.feature_names,
              list(cancer.target_names), "diagnosis")


if __name__ == "__main__":
    main()
