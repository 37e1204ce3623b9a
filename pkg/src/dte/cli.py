"""Command-line interface: train, predict, benchmark, simulate, verify-theory.

Exit codes: 0 success, 1 verification/assertion failure, 2 usage or
validation error. The default RNG seed is 42, overridable with the
DTE_SEED environment variable or --seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .data import DataError, Dataset, load_csv
from .embed import Embedding, project
from .lda import LdaModel, fit_lda, predict_lda
from .oracle import (nearest_mean_instance, oracle_embedding,
                     random_discrete_instance, sample_mixture,
                     three_cluster_spec, verify_instance)
from .pipeline import cross_validate, fit, predict
from .tree import TreeConfig

MODEL_FORMAT_VERSION = 1


def _default_seed() -> int:
    env = os.environ.get("DTE_SEED")
    return int(env) if env else 42


def _tree_config(args) -> TreeConfig:
    return TreeConfig(min_leaf_size=args.min_leaf, num_bins=args.bins,
                      max_depth=args.max_depth)


def _add_tree_flags(p):
    p.add_argument("--min-leaf", type=int, default=10, help="minimum rows per leaf")
    p.add_argument("--bins", type=int, default=30,
                   help="equiprobable bins for split candidates")
    p.add_argument("--max-depth", type=int, default=None, help="depth cap (default none)")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default 42, or env DTE_SEED)")


def _load_labeled(args) -> Dataset:
    label = args.label if args.header else int(args.label)
    return load_csv(args.data, label, has_header=args.header)


def cmd_train(args) -> int:
    ds = _load_labeled(args)
    cfg = _tree_config(args)
    seed = args.seed if args.seed is not None else _default_seed()
    clf = fit(ds, cfg, t=args.trees, seed=seed)
    model = {
        "format_version": MODEL_FORMAT_VERSION,
        "package_version": __version__,
        "config": cfg.to_dict(),
        "t": args.trees,
        "seed": seed,
        "label_column": ds.label_column,
        "label_names": list(ds.label_names),
        "schema": [c.to_dict() for c in ds.schema],
        "has_header": args.header,
        "embedding": clf.embedding.to_dict(),
        "lda": clf.lda.to_dict(),
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(model, fh)
    if args.verbose:
        print(f"trained on {ds.n} rows, {ds.p} features, {ds.n_classes} classes; "
              f"embedding width {clf.embedding.m}", file=sys.stderr)
    return 0


def _load_model(path):
    with open(path, encoding="utf-8") as fh:
        model = json.load(fh)
    if model.get("format_version") != MODEL_FORMAT_VERSION:
        raise DataError(f"{path}: unsupported model format")
    emb = Embedding.from_dict(model["embedding"])
    lda = LdaModel.from_dict(model["lda"])
    return model, emb, lda


def _encode_features(model, rows, header, path):
    """Re-encode raw CSV feature rows against the stored training schema."""
    schema = model["schema"]
    # original source columns in training order
    sources: list[str] = []
    for col in schema:
        name = col["source"] if col["kind"] == "onehot" else col["name"]
        if name not in sources:
            sources.append(name)

    if header is not None:
        extra = [h for h in header if h not in sources]
        missing = [s for s in sources if s not in header]
        if extra or missing:
            parts = []
            if extra:
                parts.append(f"unknown columns {extra}")
            if missing:
                parts.append(f"missing columns {missing}")
            raise DataError(f"{path}: schema mismatch: " + "; ".join(parts))
        col_of = {h: i for i, h in enumerate(header)}
    else:
        if rows and len(rows[0]) != len(sources):
            raise DataError(f"{path}: expected {len(sources)} feature columns, "
                            f"got {len(rows[0])}")
        col_of = {s: i for i, s in enumerate(sources)}

    known_cats: dict[str, set] = {}
    for col in schema:
        if col["kind"] == "onehot":
            known_cats.setdefault(col["source"], set()).add(col["category"])

    X = np.zeros((len(rows), len(schema)))
    for i, row in enumerate(rows):
        if len(row) != len(header or sources):
            raise DataError(f"{path}: row {i + 1}: wrong field count")
        for j, col in enumerate(schema):
            if col["kind"] == "numeric":
                cell = row[col_of[col["name"]]]
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(f"{path}: row {i + 1}: non-numeric value {cell!r} "
                                    f"in column {col['name']!r}") from None
                if not math.isfinite(v):
                    raise DataError(f"{path}: row {i + 1}: non-finite value "
                                    f"in column {col['name']!r}")
                X[i, j] = v
            else:
                cell = row[col_of[col["source"]]]
                X[i, j] = 1.0 if cell == col["category"] else 0.0
        # reject category values never seen in training
        for s, cats in known_cats.items():
            if row[col_of[s]] not in cats:
                raise DataError(f"{path}: row {i + 1}: unknown category "
                                f"{row[col_of[s]]!r} in column {s!r}")
    return X


def cmd_predict(args) -> int:
    model, emb, lda = _load_model(args.model)
    with open(args.data, newline="", encoding="utf-8") as fh:
        raw = list(csv.reader(fh))
    header = raw[0] if (raw and model["has_header"]) else None
    rows = raw[1:] if header is not None else raw

    X = _encode_features(model, rows, header, args.data)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([model["label_column"]])
        if len(X):
            preds = predict_lda(lda, project(emb, X))
            for c in preds:
                w.writerow([model["label_names"][c - 1]])
    return 0


def cmd_benchmark(args) -> int:
    ds = _load_labeled(args)
    cfg = _tree_config(args)
    seed = args.seed if args.seed is not None else _default_seed()
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    reports = cross_validate(ds, methods, replicates=args.replicates,
                             folds=args.folds, seed=seed, cfg=cfg)
    name = Path(args.data).stem

    csv_path = f"{args.out_prefix}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["dataset", "method", "replicate", "fold", "error",
                    "train_ms", "test_ms"])
        for rep in reports:
            w.writerows(rep.rows(name))

    summary = {"dataset": name, "n": ds.n, "p": ds.p, "k": ds.n_classes,
               "replicates": args.replicates, "folds": args.folds, "seed": seed,
               "methods": [rep.to_dict() for rep in reports]}
    with open(f"{args.out_prefix}.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)

    for rep in reports:
        print(f"{name} {rep.method}: error {100 * rep.mean_error:.2f}% "
              f"+/- {100 * rep.std_error:.2f}%")
    return 0


def cmd_simulate(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    spec = three_cluster_spec(sigma=args.sigma)
    cfg = TreeConfig(min_leaf_size=args.min_leaf, num_bins=args.bins)

    records = []
    dump_done = False
    for r in range(args.repeats):
        train_seed, test_seed = np.random.SeedSequence([seed, r]).spawn(2)
        train, comps = sample_mixture(spec, args.n, train_seed, return_components=True)
        test = sample_mixture(spec, args.n_test, test_seed)

        clf = fit(train, cfg, t=args.trees, seed=np.random.SeedSequence([seed, r, 7]))
        z_train_acc = float(np.mean(predict(clf, train.features) == train.labels))
        z_test_acc = float(np.mean(predict(clf, test.features) == test.labels))

        zo_train = oracle_embedding(spec, train.features)
        lda_o = fit_lda(zo_train, train.labels)
        o_train_acc = float(np.mean(predict_lda(lda_o, zo_train) == train.labels))
        zo_test = oracle_embedding(spec, test.features)
        o_test_acc = float(np.mean(predict_lda(lda_o, zo_test) == test.labels))

        records.append({"train_acc": z_train_acc, "test_acc": z_test_acc,
                        "oracle_train_acc": o_train_acc, "oracle_test_acc": o_test_acc,
                        "m": clf.embedding.m})
        if args.dump and not dump_done:
            z = project(clf.embedding, train.features)
            with open(args.dump, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow([f"z{j}" for j in range(z.shape[1])] + ["label", "cluster"])
                for i in range(train.n):
                    w.writerow([repr(float(v)) for v in z[i]]
                               + [int(train.labels[i]), int(comps[i]) + 1])
            dump_done = True

    mean = {key: float(np.mean([rec[key] for rec in records]))
            for key in ("train_acc", "test_acc", "oracle_train_acc", "oracle_test_acc")}
    report = {"n": args.n, "n_test": args.n_test, "sigma": args.sigma,
              "trees": args.trees, "seed": seed, "repeats": args.repeats,
              "mean": mean, "runs": records}
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def cmd_verify_theory(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    records = []
    failures = 0
    for i in range(args.instances):
        if args.epsilon_zero:
            joint, part = random_discrete_instance([seed, i], homogeneous=True)
        elif i % 2 == 0:
            joint, part = random_discrete_instance([seed, i])
        else:
            joint, part = nearest_mean_instance([seed, i], pure=(i % 4 == 3))
        rec = verify_instance(joint, part, instance_seed=[seed, i])
        records.append(rec)
        bad_bound = not rec["bound_ok"]
        bad_zero = args.epsilon_zero and rec["deviation"] != 0.0
        bad_error = rec["hypothesis_ok"] and \
            abs(rec["Lg_classifier"] - rec["Lg_formula"]) > 1e-12
        if bad_bound or bad_zero or bad_error:
            failures += 1

    report = {"instances": records, "failures": failures, "ok": failures == 0}
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(f"verified {args.instances} instances, {failures} failures")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dte",
        description="Leaf-mean decision tree embeddings with LDA classification.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model and write it as JSON")
    p.add_argument("--data", required=True, help="labeled CSV file")
    p.add_argument("--label", required=True,
                   help="label column name (or zero-based index with --no-header)")
    p.add_argument("--no-header", dest="header", action="store_false")
    p.add_argument("--trees", type=int, default=1, help="ensemble size t")
    _add_tree_flags(p)
    p.add_argument("--out", required=True, help="output model JSON path")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict labels for a feature CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="feature CSV matching the training schema")
    p.add_argument("--out", required=True, help="output predictions CSV "
                   "(columns: the original label column)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("benchmark", help="repeated stratified cross-validation")
    p.add_argument("--data", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--no-header", dest="header", action="store_false")
    p.add_argument("--methods", default="dte-1,dte-3,tree",
                   help="comma list of dte-<t> and tree")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--replicates", type=int, default=10)
    _add_tree_flags(p)
    p.add_argument("--out-prefix", required=True,
                   help="writes <prefix>.csv (dataset,method,replicate,fold,error,"
                        "train_ms,test_ms) and <prefix>.json")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("simulate", help="two-class three-cluster benchmark run")
    p.add_argument("--n", type=int, default=100, help="training sample size")
    p.add_argument("--n-test", type=int, default=100)
    p.add_argument("--sigma", type=float, default=0.3)
    p.add_argument("--trees", type=int, default=1)
    p.add_argument("--repeats", type=int, default=1,
                   help="average accuracies over this many seeded runs")
    _add_tree_flags(p)
    p.add_argument("--out", help="write the accuracy report JSON here")
    p.add_argument("--dump", help="write the training embedding columns as CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-theory",
                       help="brute-force checks of the embedding guarantees")
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--epsilon-zero", action="store_true",
                   help="use only homogeneous instances (deviation must be 0)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="write per-instance reports JSON here")
    p.set_defaults(func=cmd_verify_theory)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
