"""Exact population-level verification on finite discrete supports.

Continuous statements about leaf-mean embeddings are checked here by brute
force on joints with finitely many support points, where conditional
distributions, region means, and classification errors are all exact
weighted sums. Two facts are verified per instance:

  * sufficiency: if conditional class distributions vary by at most eps
    (L1) within every region, then conditioning on the embedding instead of
    the input moves the conditional by at most eps, exactly 0 when eps = 0;
  * indicator-rule error: when every support point is nearest (in Euclidean
    norm) to its own region's mean, classifying by the largest embedding
    coordinate among each class's regions errs with probability
    sum_j P(region j) * (1 - max_c P(Y=c | region j)).

The module also hosts the Gaussian-mixture generators used by the
simulation pipeline, including the oracle embedding built from the true
component means and a Monte Carlo estimate of Bayes accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embed import anchor_intercept


@dataclass(frozen=True)
class DiscreteJoint:
    """Finite joint law: support points, their masses, and P(Y | X = x_i) rows."""

    points: np.ndarray        # (N, p)
    weights: np.ndarray       # (N,) strictly positive, sums to 1
    conditionals: np.ndarray  # (N, K) stochastic rows

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        c = np.asarray(self.conditionals, dtype=np.float64)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "conditionals", c)
        if pts.ndim != 2 or w.shape != (pts.shape[0],) or c.shape[0] != pts.shape[0]:
            raise ValueError("points (N,p), weights (N,), conditionals (N,K) required")
        if np.any(w <= 0):
            raise ValueError("support weights must be strictly positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("support weights must sum to 1")
        if np.any(c < 0) or np.any(np.abs(c.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("conditional rows must be distributions")

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def n_classes(self) -> int:
        return self.conditionals.shape[1]


@dataclass(frozen=True)
class Partition:
    """Assignment of each support point to a region 0..m-1, all nonempty."""

    regions: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.regions, dtype=np.int64)
        object.__setattr__(self, "regions", r)
        if r.ndim != 1 or r.size == 0 or r.min() < 0:
            raise ValueError("regions must be a non-empty vector of ids >= 0")
        m = int(r.max()) + 1
        if np.any(np.bincount(r, minlength=m) == 0):
            raise ValueError("every region must contain at least one point")

    @property
    def n_regions(self) -> int:
        return int(self.regions.max()) + 1

    def members(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.regions == j)


def epsilon_homogeneity(joint: DiscreteJoint, part: Partition):
    """Max within-region L1 spread of P(Y|X): per-region values and the max."""
    eps = np.zeros(part.n_regions)
    for j in range(part.n_regions):
        rows = joint.conditionals[part.members(j)]
        if rows.shape[0] > 1:
            spread = np.abs(rows[:, None, :] - rows[None, :, :]).sum(axis=2)
            eps[j] = float(spread.max())
    return eps, float(eps.max())


@dataclass(frozen=True)
class PopulationEmbedding:
    anchors: np.ndarray    # (m, p) region means E[X | region]
    intercept: np.ndarray  # (m,) -||anchor||^2 / 2
    values: np.ndarray     # (N, m) embedding of every support point
    masses: np.ndarray     # (m,) P(X in region)


def population_embedding(joint: DiscreteJoint, part: Partition) -> PopulationEmbedding:
    """Exact region-mean anchors and per-point embedding values."""
    m = part.n_regions
    anchors = np.empty((m, joint.points.shape[1]))
    masses = np.empty(m)
    for j in range(m):
        idx = part.members(j)
        mass = joint.weights[idx].sum()
        if mass <= 0.0:
            raise ValueError(f"region {j} has zero probability mass")
        masses[j] = mass
        anchors[j] = (joint.weights[idx, None] * joint.points[idx]).sum(axis=0) / mass
    intercept = anchor_intercept(anchors)
    values = joint.points @ anchors.T + intercept
    return PopulationEmbedding(anchors, intercept, values, masses)


def region_posteriors(joint: DiscreteJoint, part: Partition) -> np.ndarray:
    """P(Y | region j) rows: mass-weighted mixtures of member conditionals.

    When every member row is identical the common row is returned as-is,
    keeping the homogeneous case exact in floating point.
    """
    out = np.empty((part.n_regions, joint.n_classes))
    for j in range(part.n_regions):
        idx = part.members(j)
        rows = joint.conditionals[idx]
        if np.all(rows == rows[0]):
            out[j] = rows[0]
        else:
            out[j] = (joint.weights[idx, None] * rows).sum(axis=0) / joint.weights[idx].sum()
    return out


@dataclass(frozen=True)
class SufficiencyReport:
    epsilon: float
    deviation: float   # max_i || P(Y|X=x_i) - P(Y | region(x_i)) ||_1
    bound_ok: bool
    epsilon_by_region: np.ndarray


def check_sufficiency(joint: DiscreteJoint, part: Partition) -> SufficiencyReport:
    """Conditioning on the embedding moves P(Y|X) by at most the homogeneity eps."""
    eps_regions, eps = epsilon_homogeneity(joint, part)
    post = region_posteriors(joint, part)
    deviation = float(np.abs(joint.conditionals - post[part.regions]).sum(axis=1).max())
    return SufficiencyReport(eps, deviation, deviation <= eps + 1e-12, eps_regions)


@dataclass(frozen=True)
class IndicatorRule:
    """Classify an embedding by its largest coordinate within each class's regions.

    region_classes[j] is the majority class id of region j (ties to the
    smallest id); the class score of z is max over that class's coordinates,
    -inf for classes owning no region.
    """

    region_classes: np.ndarray  # (m,) class ids 1..K
    n_classes: int

    def class_regions(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.region_classes == c)

    def classify(self, Z) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
        owned = self.region_classes[None, :] == np.arange(1, self.n_classes + 1)[:, None]
        scores = np.where(owned[None, :, :], Z[:, None, :], -np.inf).max(axis=2)
        return np.argmax(scores, axis=1).astype(np.int64) + 1


@dataclass(frozen=True)
class IndicatorErrorReport:
    hypothesis_ok: bool        # every point nearest its own region mean
    error_classified: float    # error of the indicator rule, point by point
    error_formula: float       # sum_j P(region j) * impurity_j
    region_classes: np.ndarray
    agree: bool                # |classified - formula| <= 1e-12


def check_indicator_error(joint: DiscreteJoint, part: Partition) -> IndicatorErrorReport:
    """Compare the indicator rule's exact error against the impurity formula.

    The two agree whenever the nearest-own-mean hypothesis holds; when it
    does not, both numbers are still reported for diagnosis.
    """
    pe = population_embedding(joint, part)
    # hypothesis check by direct squared distances, independent of the Z path
    d2 = ((joint.points[:, None, :] - pe.anchors[None, :, :]) ** 2).sum(axis=2)
    hypothesis_ok = bool(np.all(np.argmin(d2, axis=1) == part.regions))

    post = region_posteriors(joint, part)
    rule = IndicatorRule(np.argmax(post, axis=1).astype(np.int64) + 1, joint.n_classes)
    preds = rule.classify(pe.values)
    per_point = 1.0 - joint.conditionals[np.arange(joint.n_points), preds - 1]
    error_classified = float((joint.weights * per_point).sum())

    impurity = 1.0 - post.max(axis=1)
    error_formula = float((pe.masses * impurity).sum())
    agree = abs(error_classified - error_formula) <= 1e-12
    return IndicatorErrorReport(hypothesis_ok, error_classified, error_formula,
                                rule.region_classes, agree)


def verify_instance(joint: DiscreteJoint, part: Partition, instance_seed=None) -> dict:
    """Both checks on one instance, as a JSON-ready record."""
    suff = check_sufficiency(joint, part)
    ind = check_indicator_error(joint, part)
    return {
        "instance_seed": instance_seed,
        "epsilon": suff.epsilon,
        "deviation": suff.deviation,
        "bound_ok": suff.bound_ok,
        "Lg_classifier": ind.error_classified,
        "Lg_formula": ind.error_formula,
        "hypothesis_ok": ind.hypothesis_ok,
    }


# ---------------------------------------------------------------------------
# instance generators


def random_discrete_instance(seed, n_points=20, n_regions=3, n_classes=3, dim=2,
                             homogeneous=False):
    """Random discrete joint plus an arbitrary nonempty partition.

    With homogeneous=True all points of a region share one conditional row
    (the eps = 0 case).
    """
    rng = np.random.default_rng(seed)
    points = rng.normal(size=(n_points, dim))
    weights = rng.uniform(0.2, 1.0, size=n_points)
    weights = weights / weights.sum()
    base = np.concatenate([np.arange(n_regions),
                           rng.integers(0, n_regions, size=n_points - n_regions)])
    regions = rng.permutation(base)
    if homogeneous:
        per_region = rng.dirichlet(np.ones(n_classes), size=n_regions)
        cond = per_region[regions]
    else:
        cond = rng.dirichlet(np.ones(n_classes), size=n_points)
    return DiscreteJoint(points, weights, cond), Partition(regions)


def nearest_mean_instance(seed, n_points=20, n_regions=3, n_classes=3, dim=2,
                          pure=False, max_attempts=50):
    """Instance whose partition is a fixed point of weighted nearest-mean
    assignment, so every point is nearest its own region mean.

    With pure=True each region's points share a one-hot conditional row.
    """
    rng = np.random.default_rng(seed)
    points = rng.normal(size=(n_points, dim))
    weights = rng.uniform(0.2, 1.0, size=n_points)
    weights = weights / weights.sum()

    regions = None
    for _ in range(max_attempts):
        anchors = points[rng.choice(n_points, size=n_regions, replace=False)]
        assign = None
        for _ in range(200):
            d2 = ((points[:, None, :] - anchors[None, :, :]) ** 2).sum(axis=2)
            new_assign = np.argmin(d2, axis=1)
            if np.any(np.bincount(new_assign, minlength=n_regions) == 0):
                assign = None
                break
            if assign is not None and np.array_equal(new_assign, assign):
                break
            assign = new_assign
            for j in range(n_regions):
                idx = np.flatnonzero(assign == j)
                anchors[j] = (weights[idx, None] * points[idx]).sum(axis=0) / weights[idx].sum()
        if assign is not None:
            regions = assign
            break
    if regions is None:
        raise RuntimeError("nearest-mean partition did not stabilize; try another seed")

    if pure:
        region_class = rng.integers(1, n_classes + 1, size=n_regions)
        cond = np.zeros((n_points, n_classes))
        cond[np.arange(n_points), region_class[regions] - 1] = 1.0
    else:
        cond = rng.dirichlet(np.ones(n_classes), size=n_points)
    return DiscreteJoint(points, weights, cond), Partition(regions)


def two_class_interval_joint(n_grid: int = 10_000) -> DiscreteJoint:
    """Uniform grid discretization of two unit-interval classes on [-1, 1].

    Class 1 is uniform on [-1, 0], class 2 on [0, 1], equal priors; cell
    centers never sit at 0, so conditionals are one-hot by sign.
    """
    h = 2.0 / n_grid
    centers = -1.0 + (np.arange(n_grid) + 0.5) * h
    weights = np.full(n_grid, 1.0 / n_grid)
    cond = np.zeros((n_grid, 2))
    cond[centers < 0, 0] = 1.0
    cond[centers > 0, 1] = 1.0
    return DiscreteJoint(centers[:, None], weights, cond)


def threshold_partition(joint: DiscreteJoint, threshold: float, feature: int = 0) -> Partition:
    """Two regions split by x[feature] < threshold (region 0) vs >= (region 1)."""
    return Partition((joint.points[:, feature] >= threshold).astype(np.int64))


# ---------------------------------------------------------------------------
# Gaussian-mixture simulation model


@dataclass(frozen=True)
class GaussianMixtureSpec:
    """Isotropic Gaussian clusters, each owned by a class.

    Sampling draws the class by prior, a component uniformly within the
    class, then an isotropic Gaussian around that component's mean. sigma
    may be 0 (point-mass clusters); density-based operations require > 0.
    """

    means: np.ndarray              # (M, p)
    sigma: float
    component_classes: np.ndarray  # (M,) class ids 1..K
    class_priors: np.ndarray       # (K,)

    def __post_init__(self):
        mu = np.atleast_2d(np.asarray(self.means, dtype=np.float64))
        cc = np.asarray(self.component_classes, dtype=np.int64)
        pr = np.asarray(self.class_priors, dtype=np.float64)
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "component_classes", cc)
        object.__setattr__(self, "class_priors", pr)
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if cc.shape != (mu.shape[0],):
            raise ValueError("one class id per component required")
        k = pr.shape[0]
        if cc.min(initial=1) < 1 or cc.max(initial=0) > k:
            raise ValueError("component class ids must lie in 1..K")
        if np.any(np.bincount(cc, minlength=k + 1)[1:] == 0):
            raise ValueError("every class needs at least one component")
        if np.any(pr < 0) or abs(pr.sum() - 1.0) > 1e-12:
            raise ValueError("class priors must sum to 1")

    @property
    def n_components(self) -> int:
        return self.means.shape[0]

    @property
    def n_classes(self) -> int:
        return self.class_priors.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]


def three_cluster_spec(sigma: float = 0.3) -> GaussianMixtureSpec:
    """Two-class planar benchmark: class 1 owns clusters at (0,0) and (0,3),
    class 2 the cluster at (1,2); class priors 2/3 and 1/3."""
    return GaussianMixtureSpec(
        means=np.array([[0.0, 0.0], [0.0, 3.0], [1.0, 2.0]]),
        sigma=sigma,
        component_classes=np.array([1, 1, 2]),
        class_priors=np.array([2.0 / 3.0, 1.0 / 3.0]),
    )


def _draw(spec: GaussianMixtureSpec, n: int, rng: np.random.Generator):
    labels = rng.choice(np.arange(1, spec.n_classes + 1), size=n, p=spec.class_priors)
    groups = [np.flatnonzero(spec.component_classes == c)
              for c in range(1, spec.n_classes + 1)]
    sizes = np.array([g.size for g in groups])
    lookup = np.full((spec.n_classes, int(sizes.max())), -1, dtype=np.int64)
    for c, g in enumerate(groups):
        lookup[c, : g.size] = g
    picks = rng.integers(0, sizes[labels - 1])
    components = lookup[labels - 1, picks]
    X = spec.means[components] + spec.sigma * rng.standard_normal((n, spec.dim))
    return X, labels, components


def sample_mixture(spec: GaussianMixtureSpec, n: int, seed, return_components=False):
    """i.i.d. sample as a Dataset; n must be large enough that every class
    is drawn at least once (raises otherwise)."""
    from .data import from_arrays

    X, labels, components = _draw(spec, n, np.random.default_rng(seed))
    ds = from_arrays(X, labels)
    if ds.n_classes != spec.n_classes:
        raise ValueError(f"sample of size {n} missed a class; increase n")
    return (ds, components) if return_components else ds


def oracle_embedding(spec: GaussianMixtureSpec, X) -> np.ndarray:
    """Embedding built from the true component means instead of leaf means."""
    X = np.asarray(X, dtype=np.float64)
    return X @ spec.means.T + anchor_intercept(spec.means)


def bayes_accuracy(spec: GaussianMixtureSpec, n_mc: int, seed) -> float:
    """Monte Carlo accuracy of the exact posterior-argmax rule."""
    if spec.sigma <= 0:
        raise ValueError("density-based Bayes rule requires sigma > 0")
    if n_mc < 1:
        raise ValueError("n_mc must be >= 1")
    X, labels, _ = _draw(spec, n_mc, np.random.default_rng(seed))
    d2 = ((X[:, None, :] - spec.means[None, :, :]) ** 2).sum(axis=2)
    # shift by the row minimum so at least one exponential survives underflow
    lik = np.exp(-(d2 - d2.min(axis=1, keepdims=True)) / (2.0 * spec.sigma ** 2))
    scores = np.zeros((n_mc, spec.n_classes))
    for c in range(1, spec.n_classes + 1):
        comps = np.flatnonzero(spec.component_classes == c)
        scores[:, c - 1] = spec.class_priors[c - 1] * lik[:, comps].mean(axis=1)
    preds = np.argmax(scores, axis=1) + 1
    return float(np.mean(preds == labels))
