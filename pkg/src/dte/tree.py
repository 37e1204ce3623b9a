"""CART-style classification tree with quantile-binned split search.

Growth is greedy top-down. At each node the candidate thresholds for a
feature are the boundaries of an equiprobable binning of that feature's
values at the node (at most num_bins - 1 of them), and the accepted split
is the one with the largest Gini impurity decrease, subject to both
children holding at least min_leaf_size rows and the decrease being
strictly positive. Routing is x[j] < threshold -> left, else right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .data import Dataset


@dataclass(frozen=True)
class TreeConfig:
    min_leaf_size: int = 10
    num_bins: int = 30
    max_depth: int | None = None

    def __post_init__(self):
        if self.min_leaf_size < 1:
            raise ValueError("min_leaf_size must be >= 1")
        if self.num_bins < 2:
            raise ValueError("num_bins must be >= 2")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0 or None")

    def to_dict(self) -> dict:
        return {"min_leaf_size": self.min_leaf_size, "num_bins": self.num_bins,
                "max_depth": self.max_depth}

    @staticmethod
    def from_dict(d: dict) -> "TreeConfig":
        return TreeConfig(d["min_leaf_size"], d["num_bins"], d.get("max_depth"))


@dataclass
class SplitNode:
    feature: int
    threshold: float
    left: Union["SplitNode", "LeafNode", None] = None
    right: Union["SplitNode", "LeafNode", None] = None


@dataclass
class LeafNode:
    leaf_id: int
    histogram: np.ndarray          # class counts, index c-1 -> class c
    indices: np.ndarray            # training rows routed here; empty after deserialization

    @property
    def majority(self) -> int:
        """Majority class id; ties resolve to the smallest id."""
        return int(np.argmax(self.histogram)) + 1

    @property
    def size(self) -> int:
        return int(self.histogram.sum())


@dataclass
class DecisionTree:
    root: Union[SplitNode, LeafNode]
    leaves: list[LeafNode]         # position j holds the leaf with leaf_id j
    n_features: int
    n_classes: int
    config: TreeConfig

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    def apply(self, X) -> np.ndarray | int:
        """Leaf id reached by each row of X (or by a single vector)."""
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got shape {X.shape}")
        if X.size and not np.all(np.isfinite(X)):
            raise ValueError("inputs must be finite")
        out = np.empty(X.shape[0], dtype=np.int64)
        stack = [(self.root, np.arange(X.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if idx.size == 0:
                continue
            if isinstance(node, LeafNode):
                out[idx] = node.leaf_id
            else:
                goes_left = X[idx, node.feature] < node.threshold
                stack.append((node.left, idx[goes_left]))
                stack.append((node.right, idx[~goes_left]))
        return int(out[0]) if single else out

    def predict(self, X) -> np.ndarray | int:
        """Majority-class label of the reached leaf."""
        ids = self.apply(X)
        majorities = np.array([leaf.majority for leaf in self.leaves], dtype=np.int64)
        if np.isscalar(ids) or np.ndim(ids) == 0:
            return int(majorities[ids])
        return majorities[ids]

    def to_dict(self) -> dict:
        def node_dict(node):
            if isinstance(node, LeafNode):
                return {"leaf_id": node.leaf_id, "histogram": node.histogram.tolist()}
            return {"feature": node.feature, "threshold": node.threshold,
                    "left": node_dict(node.left), "right": node_dict(node.right)}
        return {"n_features": self.n_features, "n_classes": self.n_classes,
                "config": self.config.to_dict(), "root": node_dict(self.root)}

    @staticmethod
    def from_dict(d: dict) -> "DecisionTree":
        leaves: list[LeafNode] = []

        def build(nd):
            if "leaf_id" in nd:
                leaf = LeafNode(nd["leaf_id"], np.asarray(nd["histogram"], dtype=np.int64),
                                np.empty(0, dtype=np.int64))
                leaves.append(leaf)
                return leaf
            return SplitNode(nd["feature"], nd["threshold"],
                             build(nd["left"]), build(nd["right"]))

        root = build(d["root"])
        leaves.sort(key=lambda lf: lf.leaf_id)
        if [lf.leaf_id for lf in leaves] != list(range(len(leaves))):
            raise ValueError("leaf ids must be 0..m-1 without gaps")
        return DecisionTree(root, leaves, d["n_features"], d["n_classes"],
                            TreeConfig.from_dict(d["config"]))


def fit_tree(ds: Dataset, cfg: TreeConfig = TreeConfig()) -> DecisionTree:
    """Fit a classification tree on the dataset. Deterministic given (ds, cfg)."""
    return fit_tree_arrays(ds.features, ds.labels, ds.n_classes, cfg)


def fit_tree_arrays(X: np.ndarray, y: np.ndarray, n_classes: int,
                    cfg: TreeConfig = TreeConfig()) -> DecisionTree:
    """Fit on raw arrays; used for bootstrap resamples that may miss classes."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y0 = np.asarray(y, dtype=np.int64) - 1
    n, p = X.shape
    leaves: list[LeafNode] = []

    def make_leaf(rows: np.ndarray) -> LeafNode:
        hist = np.bincount(y0[rows], minlength=n_classes)
        leaf = LeafNode(len(leaves), hist, np.sort(rows))
        leaves.append(leaf)
        return leaf

    root_holder = SplitNode(-1, 0.0)  # sentinel; its .left becomes the root
    # stack entries: (rows, depth, parent, attr); right pushed first so the
    # left subtree is fully grown first and leaf ids follow pre-order
    stack = [(np.arange(n), 0, root_holder, "left")]
    while stack:
        rows, depth, parent, attr = stack.pop()
        split = _choose_split(X, y0, rows, n_classes, depth, cfg)
        if split is None:
            setattr(parent, attr, make_leaf(rows))
        else:
            feature, threshold, left_rows, right_rows = split
            node = SplitNode(feature, threshold)
            setattr(parent, attr, node)
            stack.append((right_rows, depth + 1, node, "right"))
            stack.append((left_rows, depth + 1, node, "left"))

    return DecisionTree(root_holder.left, leaves, p, n_classes, cfg)


def _choose_split(X, y0, rows, n_classes, depth, cfg):
    n = rows.size
    if n < 2 * cfg.min_leaf_size:
        return None
    if cfg.max_depth is not None and depth >= cfg.max_depth:
        return None
    counts = np.bincount(y0[rows], minlength=n_classes)
    parent_gini = 1.0 - float(((counts / n) ** 2).sum())
    if parent_gini == 0.0:
        return None

    yr = y0[rows]
    best_dec = 0.0
    best = None
    for j in range(X.shape[1]):
        vals = X[rows, j]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        if sv[0] == sv[-1]:
            continue
        cands = _bin_boundaries(sv, cfg.num_bins)
        if cands.size == 0:
            continue
        left_n = np.searchsorted(sv, cands, side="left")
        ok = (left_n >= cfg.min_leaf_size) & (n - left_n >= cfg.min_leaf_size)
        if not ok.any():
            continue
        cands, left_n = cands[ok], left_n[ok]

        onehot = np.zeros((n, n_classes), dtype=np.int64)
        onehot[np.arange(n), yr[order]] = 1
        cum = np.cumsum(onehot, axis=0)
        left_counts = cum[left_n - 1]
        right_counts = counts - left_counts
        ln = left_n.astype(np.float64)
        rn = float(n) - ln
        gini_l = 1.0 - ((left_counts / ln[:, None]) ** 2).sum(axis=1)
        gini_r = 1.0 - ((right_counts / rn[:, None]) ** 2).sum(axis=1)
        dec = parent_gini - (ln / n) * gini_l - (rn / n) * gini_r
        i = int(np.argmax(dec))  # first max -> lowest threshold on ties
        if dec[i] > best_dec:    # strict -> lowest feature index on ties
            best_dec = float(dec[i])
            sorted_rows = rows[order]
            best = (j, float(cands[i]),
                    sorted_rows[: left_n[i]], sorted_rows[left_n[i]:])
    return best


def _bin_boundaries(sorted_vals: np.ndarray, num_bins: int) -> np.ndarray:
    """Equiprobable-bin boundaries strictly inside the observed value range."""
    n = sorted_vals.size
    pos = np.arange(1, num_bins) * (n - 1) / num_bins
    lo = pos.astype(np.int64)
    frac = pos - lo
    hi = np.minimum(lo + 1, n - 1)
    edges = sorted_vals[lo] * (1.0 - frac) + sorted_vals[hi] * frac
    edges = np.unique(edges)
    return edges[(edges > sorted_vals[0]) & (edges < sorted_vals[-1])]


def predict_tree(tree: DecisionTree, X):
    """Majority-class prediction; module-level alias of DecisionTree.predict."""
    return tree.predict(X)
