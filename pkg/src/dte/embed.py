"""Leaf-mean anchor embeddings.

A fitted tree partitions the training rows into leaves; the per-leaf sample
means become anchor rows of a matrix W with intercepts b_j = -||W_j||^2 / 2,
and inputs are embedded affinely as Z = X W^T + 1 b^T. The half-norm
intercept makes coordinate j order points by closeness to anchor j:
Z_j(x) - Z_k(x) = (||x-mu_k||^2 - ||x-mu_j||^2) / 2, so the largest
coordinate names the nearest anchor. (Downstream linear classification is
invariant to the intercept convention, which only shifts the embedded cloud
by a constant vector.) Ensembles concatenate the anchors of one tree fitted
on the data itself and t-1 trees fitted on bootstrap resamples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, bootstrap
from .tree import DecisionTree, TreeConfig, fit_tree_arrays

EMBEDDING_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Embedding:
    """Anchor matrix, intercept, and the trees they came from.

    anchors[j] is the mean of the training rows in leaf j of its owning
    tree; intercept[j] == -||anchors[j]||^2 / 2. Column blocks follow tree
    order, with leaf_counts[s] columns for tree s.
    """

    anchors: np.ndarray
    intercept: np.ndarray
    leaf_counts: tuple[int, ...]
    trees: tuple[DecisionTree, ...]

    def __post_init__(self):
        object.__setattr__(self, "anchors", np.asarray(self.anchors, dtype=np.float64))
        object.__setattr__(self, "intercept", np.asarray(self.intercept, dtype=np.float64))
        if self.anchors.ndim != 2 or self.intercept.shape != (self.anchors.shape[0],):
            raise ValueError("anchors must be (m, p) with one intercept per row")
        if sum(self.leaf_counts) != self.anchors.shape[0]:
            raise ValueError("leaf_counts must sum to the anchor count")

    @property
    def m(self) -> int:
        return self.anchors.shape[0]

    @property
    def p(self) -> int:
        return self.anchors.shape[1]

    @property
    def n_trees(self) -> int:
        return len(self.leaf_counts)

    def to_dict(self) -> dict:
        return {
            "version": EMBEDDING_FORMAT_VERSION,
            "t": self.n_trees,
            "leaf_counts": list(self.leaf_counts),
            "W": self.anchors.tolist(),
            "b": self.intercept.tolist(),
            "trees": [tree.to_dict() for tree in self.trees],
        }

    @staticmethod
    def from_dict(d: dict) -> "Embedding":
        return Embedding(np.asarray(d["W"], dtype=np.float64),
                         np.asarray(d["b"], dtype=np.float64),
                         tuple(d["leaf_counts"]),
                         tuple(DecisionTree.from_dict(t) for t in d["trees"]))


def leaf_means(ds: Dataset, tree: DecisionTree) -> np.ndarray:
    """Per-leaf mean feature vectors, one row per leaf id."""
    return _leaf_means_arrays(ds.features, tree)


def _leaf_means_arrays(X: np.ndarray, tree: DecisionTree) -> np.ndarray:
    means = np.empty((tree.n_leaves, X.shape[1]))
    if all(leaf.indices.size == leaf.size for leaf in tree.leaves):
        for leaf in tree.leaves:
            means[leaf.leaf_id] = X[leaf.indices].mean(axis=0)
        return means
    # deserialized tree: recover index sets by routing the rows
    ids = tree.apply(X)
    for j in range(tree.n_leaves):
        rows = np.flatnonzero(ids == j)
        if rows.size == 0:
            raise ValueError(f"leaf {j} received no rows; was the tree fitted on this data?")
        means[j] = X[rows].mean(axis=0)
    return means


def anchor_intercept(anchors: np.ndarray) -> np.ndarray:
    """Intercept vector -||anchor||^2 / 2 paired with an anchor matrix."""
    return -0.5 * (anchors ** 2).sum(axis=1)


def _single_tree(X: np.ndarray, y: np.ndarray, n_classes: int, cfg: TreeConfig):
    tree = fit_tree_arrays(X, y, n_classes, cfg)
    anchors = _leaf_means_arrays(X, tree)
    return tree, anchors, anchor_intercept(anchors)


def dte1(ds: Dataset, cfg: TreeConfig = TreeConfig()):
    """Single-tree embedding of the dataset: returns (Z, Embedding)."""
    if ds.n_classes < 2:
        raise ValueError("supervised fitting needs at least two classes")
    tree, anchors, intercept = _single_tree(ds.features, ds.labels, ds.n_classes, cfg)
    emb = Embedding(anchors, intercept, (tree.n_leaves,), (tree,))
    z = ds.features @ anchors.T + intercept
    return z, emb


def dte_t(ds: Dataset, cfg: TreeConfig, t: int, seed):
    """Ensemble embedding: tree 1 on the data, trees 2..t on bootstrap resamples.

    Anchor blocks are concatenated in tree order; each bootstrap tree's leaf
    means are taken over its own resampled rows (duplicates counted with
    multiplicity). Z embeds the original rows through all anchor blocks, so
    dte_t(ds, cfg, 1, seed) is bit-identical to dte1(ds, cfg).
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    z1, emb1 = dte1(ds, cfg)
    if t == 1:
        return z1, emb1

    anchor_blocks = [emb1.anchors]
    intercepts = [emb1.intercept]
    z_blocks = [z1]
    trees = list(emb1.trees)
    entropy = seed.entropy if isinstance(seed, np.random.SeedSequence) else seed
    # stateless per-tree streams keyed by tree index, so repeated fits with
    # the same seed object stay identical
    children = [np.random.SeedSequence(entropy=entropy, spawn_key=(s,))
                for s in range(t - 1)]
    for s in range(1, t):
        sample = bootstrap(ds, children[s - 1])
        xb = ds.features[sample.indices]
        yb = ds.labels[sample.indices]
        tree, anchors, intercept = _single_tree(xb, yb, ds.n_classes, cfg)
        trees.append(tree)
        anchor_blocks.append(anchors)
        intercepts.append(intercept)
        z_blocks.append(ds.features @ anchors.T + intercept)

    emb = Embedding(np.vstack(anchor_blocks), np.concatenate(intercepts),
                    tuple(tree.n_leaves for tree in trees), tuple(trees))
    return np.hstack(z_blocks), emb


def project(emb: Embedding, X) -> np.ndarray:
    """Affine embedding X W^T + 1 b^T of new rows; no tree traversal."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != emb.p:
        raise ValueError(f"expected (q, {emb.p}) inputs, got shape {X.shape}")
    if X.size and not np.all(np.isfinite(X)):
        raise ValueError("inputs must be finite")
    return X @ emb.anchors.T + emb.intercept
