import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dte import DataError, bootstrap, from_arrays, load_csv, save_csv, stratified_folds


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_labels_reindexed_by_first_appearance(self, tmp_path):
        path = write(tmp_path, "x,y\n1.0,a\n2.0,b\n3.0,a\n")
        ds = load_csv(path, "y")
        assert ds.labels.tolist() == [1, 2, 1]
        assert ds.n_classes == 2
        assert ds.label_names == ("a", "b")

    def test_iris_shape(self, iris):
        assert (iris.n, iris.p, iris.n_classes) == (150, 4, 3)
        assert all(c.kind == "numeric" for c in iris.schema)

    def test_one_hot_expansion(self, tmp_path):
        path = write(tmp_path, "c,lab\nx,1\ny,2\nz,1\n")
        ds = load_csv(path, "lab")
        assert ds.p == 3
        assert [c.name for c in ds.schema] == ["c=x", "c=y", "c=z"]
        assert ds.features[1].tolist() == [0.0, 1.0, 0.0]

    def test_wrong_arity_reports_line(self, tmp_path):
        path = write(tmp_path, "x,y\n1,a\n2,b,extra\n")
        with pytest.raises(DataError, match="line 3"):
            load_csv(path, "y")

    def test_non_finite_rejected(self, tmp_path):
        path = write(tmp_path, "x,y\n1.0,a\nnan,b\n")
        with pytest.raises(DataError, match="non-finite"):
            load_csv(path, "y")

    def test_missing_value_rejected(self, tmp_path):
        path = write(tmp_path, "x,y\n1.0,a\n,b\n")
        with pytest.raises(DataError, match="missing"):
            load_csv(path, "y")

    def test_single_class_rejected(self, tmp_path):
        path = write(tmp_path, "x,y\n1.0,a\n2.0,a\n")
        with pytest.raises(DataError, match="one class"):
            load_csv(path, "y")

    def test_unknown_label_column(self, tmp_path):
        path = write(tmp_path, "x,y\n1.0,a\n2.0,b\n")
        with pytest.raises(DataError, match="'nope'"):
            load_csv(path, "nope")

    def test_headerless_label_by_index(self, tmp_path):
        path = write(tmp_path, "1.0,a\n2.0,b\n", name="plain.csv")
        ds = load_csv(path, 1, has_header=False)
        assert ds.labels.tolist() == [1, 2]
        assert ds.schema[0].name == "c0"

    def test_round_trip_identical(self, tmp_path):
        path = write(tmp_path, "num,cat,lab\n1.5,x,a\n-2.25,y,b\n0.125,x,a\n3.0,z,b\n")
        ds = load_csv(path, "lab")
        out = tmp_path / "again.csv"
        save_csv(ds, out)
        ds2 = load_csv(out, "lab")
        assert np.array_equal(ds.features, ds2.features)
        assert np.array_equal(ds.labels, ds2.labels)
        assert ds.schema == ds2.schema
        assert ds.label_names == ds2.label_names

    @given(values=st.lists(st.sampled_from(["red", "green", "blue", "mauve"]),
                           min_size=2, max_size=30))
    @settings(max_examples=50, deadline=None)
    def test_one_hot_rows_have_exactly_one_active(self, values, tmp_path_factory):
        if len(set(values)) < 2:
            values = values + ["red", "green"]
        tmp = tmp_path_factory.mktemp("onehot")
        lines = ["c,lab"] + [f"{v},{v}" for v in values]
        ds = load_csv(write(tmp, "\n".join(lines) + "\n"), "lab")
        assert np.all(ds.features.sum(axis=1) == 1.0)
        assert np.all((ds.features == 0.0) | (ds.features == 1.0))


class TestDataset:
    def test_invariants_enforced(self):
        with pytest.raises(DataError):
            from_arrays(np.empty((0, 2)), np.empty(0, dtype=int))
        with pytest.raises(DataError):
            from_arrays([[1.0], [np.inf]], [1, 2])
        with pytest.raises(DataError):
            from_arrays([[1.0], [2.0]], [1, 3])  # class 2 missing

    def test_single_class_representable(self):
        ds = from_arrays([[1.0], [2.0]], [1, 1])
        assert ds.n_classes == 1


class TestStratifiedFolds:
    def test_exact_divisibility(self):
        ds = from_arrays(np.arange(10)[:, None], [1] * 5 + [2] * 5)
        plan = stratified_folds(ds, replicates=1, folds=5, seed=0)
        for f in range(5):
            rows = plan.test_rows(0, f)
            assert rows.size == 2
            assert sorted(ds.labels[rows].tolist()) == [1, 2]

    def test_iris_fold_sizes(self, iris):
        plan = stratified_folds(iris, replicates=2, folds=5, seed=3)
        for r in range(2):
            for f in range(5):
                assert plan.test_rows(r, f).size == 30

    def test_deterministic(self, iris):
        a = stratified_folds(iris, 3, 5, seed=9)
        b = stratified_folds(iris, 3, 5, seed=9)
        assert np.array_equal(a.assignments, b.assignments)

    def test_every_row_in_exactly_one_test_fold(self, iris):
        plan = stratified_folds(iris, 2, 5, seed=1)
        for r in range(2):
            seen = np.concatenate([plan.test_rows(r, f) for f in range(5)])
            assert sorted(seen.tolist()) == list(range(iris.n))

    @given(st.integers(min_value=0, max_value=10_000),
           st.integers(min_value=2, max_value=6),
           st.lists(st.integers(min_value=6, max_value=40), min_size=2, max_size=4))
    @settings(max_examples=40, deadline=None)
    def test_per_class_counts_balanced(self, seed, folds, class_sizes):
        labels = np.concatenate([np.full(s, c + 1) for c, s in enumerate(class_sizes)])
        ds = from_arrays(np.arange(labels.size)[:, None].astype(float), labels)
        plan = stratified_folds(ds, replicates=2, folds=folds, seed=seed)
        for r in range(2):
            for c in range(1, len(class_sizes) + 1):
                counts = np.bincount(plan.assignments[r][ds.labels == c], minlength=folds)
                assert counts.max() - counts.min() <= 1

    def test_small_class_rejected_by_name(self):
        ds = from_arrays(np.arange(8)[:, None].astype(float), [1] * 6 + [2] * 2)
        with pytest.raises(DataError, match="'2'"):
            stratified_folds(ds, 1, 5, seed=0)

    def test_json_audit(self, iris):
        import json
        plan = stratified_folds(iris, 1, 5, seed=0)
        blob = json.loads(plan.to_json())
        assert blob["folds"] == 5
        assert np.array_equal(np.asarray(blob["assignments"]), plan.assignments)


class TestBootstrap:
    def test_single_row(self):
        ds = from_arrays([[1.0]], [1])
        for seed in range(5):
            assert bootstrap(ds, seed).indices.tolist() == [0]

    def test_deterministic(self, iris):
        assert np.array_equal(bootstrap(iris, 12).indices, bootstrap(iris, 12).indices)

    def test_distinct_fraction_near_632(self):
        ds = from_arrays(np.arange(1000)[:, None].astype(float),
                         np.r_[np.ones(500, int), np.full(500, 2)])
        fractions = [np.unique(bootstrap(ds, s).indices).size / 1000 for s in range(100)]
        assert 0.60 <= np.mean(fractions) <= 0.67

    def test_indices_in_range(self, iris):
        idx = bootstrap(iris, 0).indices
        assert idx.size == iris.n
        assert idx.min() >= 0 and idx.max() < iris.n
