"""Dataset ingestion, one-hot encoding, stratified folds, and bootstrap resampling."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DataError(ValueError):
    """Malformed input file or invalid supervised dataset."""


@dataclass(frozen=True)
class Column:
    """One column of the feature matrix.

    ``kind`` is "numeric" for columns parsed as-is, or "onehot" for a binary
    column expanded from a categorical source column (``source`` names that
    column, ``category`` the value this indicator encodes).
    """

    name: str
    kind: str
    source: str | None = None
    category: str | None = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "kind": self.kind}
        if self.kind == "onehot":
            d["source"] = self.source
            d["category"] = self.category
        return d

    @staticmethod
    def from_dict(d: dict) -> "Column":
        return Column(d["name"], d["kind"], d.get("source"), d.get("category"))


@dataclass(frozen=True)
class Dataset:
    """Immutable numeric feature matrix with integer class labels.

    Labels are contiguous class ids 1..K, each appearing at least once.
    Features must be finite. K >= 2 is enforced by the fitting routines,
    not here, so single-class samples (e.g. degenerate resamples) are
    representable.
    """

    features: np.ndarray
    labels: np.ndarray
    schema: tuple[Column, ...]
    label_names: tuple[str, ...]
    label_column: str = "label"

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DataError(f"features must be a non-empty 2-D matrix, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DataError("labels must be one value per row")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain non-finite values")
        k = int(y.max(initial=0))
        if y.min(initial=1) < 1:
            raise DataError("class ids must be >= 1")
        present = np.bincount(y, minlength=k + 1)[1:]
        if np.any(present == 0):
            missing = int(np.flatnonzero(present == 0)[0]) + 1
            raise DataError(f"class {missing} has no samples")
        if len(self.schema) != X.shape[1]:
            raise DataError("schema length must match feature count")
        if len(self.label_names) != k:
            raise DataError("label_names must have one entry per class")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return int(self.labels.max())

    def subset(self, rows: np.ndarray) -> "Dataset":
        """Dataset restricted to the given rows (classes must all survive)."""
        return Dataset(self.features[rows], self.labels[rows], self.schema,
                       self.label_names, self.label_column)


def from_arrays(X, y, label_column: str = "label") -> Dataset:
    """Wrap plain arrays as a Dataset with a generated numeric schema."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    schema = tuple(Column(f"x{j}", "numeric") for j in range(X.shape[1]))
    names = tuple(str(c) for c in range(1, int(y.max(initial=0)) + 1))
    return Dataset(X, y, schema, names, label_column)


def _parse_float(text: str) -> float | None:
    try:
        return float(text)
    except ValueError:
        return None


def load_csv(path, label_column, has_header: bool = True) -> Dataset:
    """Load a labeled CSV into a Dataset.

    Numeric columns are parsed as-is; string-valued columns are one-hot
    expanded (one binary column per distinct value, lexicographic order).
    Labels are re-indexed to contiguous 1..K in order of first appearance.
    With a header the label column is selected by name, without one by
    zero-based index. Missing cells and non-finite numerics are rejected.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty file")

    if has_header:
        header = rows[0]
        body = rows[1:]
        first_line = 2
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not found in header")
        label_idx = header.index(label_column)
        label_name = label_column
    else:
        header = [f"c{j}" for j in range(len(rows[0]))]
        body = rows
        first_line = 1
        try:
            label_idx = int(label_column)
        except (TypeError, ValueError):
            raise DataError("without a header, label_column must be a zero-based index") from None
        if not 0 <= label_idx < len(header):
            raise DataError(f"{path}: label column index {label_idx} out of range")
        label_name = header[label_idx]

    if not body:
        raise DataError(f"{path}: no data rows")

    arity = len(header)
    for i, row in enumerate(body):
        lineno = first_line + i
        if len(row) != arity:
            raise DataError(f"{path}: line {lineno}: expected {arity} fields, got {len(row)}")
        for j, cell in enumerate(row):
            if cell.strip() == "":
                raise DataError(f"{path}: line {lineno}: missing value in column {header[j]!r}")

    raw_labels = [row[label_idx] for row in body]
    feat_names = [h for j, h in enumerate(header) if j != label_idx]
    feat_cols = [[row[j] for row in body] for j in range(arity) if j != label_idx]

    # labels re-indexed by first appearance
    label_names: list[str] = []
    label_map: dict[str, int] = {}
    labels = np.empty(len(body), dtype=np.int64)
    for i, v in enumerate(raw_labels):
        if v not in label_map:
            label_map[v] = len(label_names) + 1
            label_names.append(v)
        labels[i] = label_map[v]
    if len(label_names) < 2:
        raise DataError(f"{path}: only one class ({label_names[0]!r}) present")

    blocks: list[np.ndarray] = []
    schema: list[Column] = []
    for name, values in zip(feat_names, feat_cols):
        parsed = [_parse_float(v) for v in values]
        if all(x is not None for x in parsed):
            for i, x in enumerate(parsed):
                if not math.isfinite(x):
                    raise DataError(f"{path}: line {first_line + i}: non-finite value "
                                    f"{values[i]!r} in column {name!r}")
            blocks.append(np.asarray(parsed, dtype=np.float64)[:, None])
            schema.append(Column(name, "numeric"))
        else:
            cats = sorted(set(values))
            idx = {c: k for k, c in enumerate(cats)}
            block = np.zeros((len(values), len(cats)))
            block[np.arange(len(values)), [idx[v] for v in values]] = 1.0
            blocks.append(block)
            schema.extend(Column(f"{name}={c}", "onehot", source=name, category=c) for c in cats)

    features = np.hstack(blocks)
    return Dataset(features, labels, tuple(schema), tuple(label_names), label_name)


def save_csv(ds: Dataset, path) -> None:
    """Write a Dataset back to CSV, inverting one-hot groups to their source columns.

    Reloading the file with load_csv(path, ds.label_column) reproduces the
    Dataset exactly (floats are written in shortest round-trip form).
    """
    header: list[str] = []
    emitters: list = []  # (kind, payload)
    j = 0
    while j < ds.p:
        col = ds.schema[j]
        if col.kind == "numeric":
            header.append(col.name)
            emitters.append(("numeric", j))
            j += 1
        else:
            group = [j]
            while j + 1 < ds.p and ds.schema[j + 1].kind == "onehot" \
                    and ds.schema[j + 1].source == col.source:
                j += 1
                group.append(j)
            header.append(col.source)
            emitters.append(("onehot", group))
            j += 1
    header.append(ds.label_column)

    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(ds.n):
            row = []
            for kind, payload in emitters:
                if kind == "numeric":
                    row.append(repr(float(ds.features[i, payload])))
                else:
                    hot = [g for g in payload if ds.features[i, g] == 1.0]
                    if len(hot) != 1:
                        raise DataError(f"row {i}: one-hot group {ds.schema[payload[0]].source!r} "
                                        f"has {len(hot)} active columns")
                    row.append(ds.schema[hot[0]].category)
            row.append(ds.label_names[ds.labels[i] - 1])
            w.writerow(row)


@dataclass(frozen=True)
class FoldPlan:
    """Stratified test-fold assignment, one per row per replicate.

    ``assignments[r, i]`` is the fold (0..folds-1) in which row i is a test
    row during replicate r. Per class and replicate, fold counts differ by
    at most one.
    """

    assignments: np.ndarray
    folds: int
    seed: int

    def __post_init__(self):
        a = np.asarray(self.assignments, dtype=np.int64)
        object.__setattr__(self, "assignments", a)
        if a.ndim != 2:
            raise DataError("assignments must be (replicates, n)")
        if a.min() < 0 or a.max() >= self.folds:
            raise DataError("fold ids out of range")

    @property
    def replicates(self) -> int:
        return self.assignments.shape[0]

    def test_rows(self, replicate: int, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments[replicate] == fold)

    def train_rows(self, replicate: int, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments[replicate] != fold)

    def to_json(self) -> str:
        return json.dumps({
            "replicates": self.replicates,
            "folds": self.folds,
            "seed": self.seed,
            "assignments": self.assignments.tolist(),
        })


def stratified_folds(ds: Dataset, replicates: int, folds: int, seed: int) -> FoldPlan:
    """Deterministic stratified fold assignment for repeated cross-validation."""
    if folds < 2:
        raise DataError("folds must be >= 2")
    if replicates < 1:
        raise DataError("replicates must be >= 1")
    counts = np.bincount(ds.labels, minlength=ds.n_classes + 1)[1:]
    for c, cnt in enumerate(counts, start=1):
        if cnt < folds:
            raise DataError(f"class {ds.label_names[c - 1]!r} has {cnt} rows, "
                            f"fewer than folds={folds}")
    assignments = np.empty((replicates, ds.n), dtype=np.int64)
    for r in range(replicates):
        rng = np.random.default_rng([seed, r])
        start = 0
        for c in range(1, ds.n_classes + 1):
            idx = rng.permutation(np.flatnonzero(ds.labels == c))
            assignments[r, idx] = (start + np.arange(idx.size)) % folds
            start = (start + idx.size) % folds
    return FoldPlan(assignments, folds, seed)


@dataclass(frozen=True)
class BootstrapSample:
    """Row index multiset of size n drawn i.i.d. uniformly with replacement."""

    indices: np.ndarray
    seed: object

    def __post_init__(self):
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64))


def bootstrap(ds: Dataset, seed) -> BootstrapSample:
    """Draw a bootstrap sample of the dataset's rows; deterministic given seed."""
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, ds.n, size=ds.n)
    return BootstrapSample(idx, seed)
