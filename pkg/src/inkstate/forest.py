"""From-scratch random forest for binary targets, with out-of-bag
machinery, margins, and four per-feature importance measures.

Each of the ``n_tree`` trees is grown on a bootstrap sample (n draws
with replacement); its out-of-bag (OOB) rows are the training rows the
bootstrap missed. At every node ``mtry`` candidate features are sampled
without replacement and the best Gini-gain split is kept. Training is
deterministic for a given config: tree t draws from a stream seeded by
(config.seed, t), so results do not depend on thread count or
scheduling.

OOB votes drive everything downstream. A row's margin is the fraction
of its OOB trees voting for the true class minus the fraction voting
against; the OOB error counts a row as misclassified unless its margin
is strictly positive (a tied OOB vote has no majority and counts as an
error). The four importance measures for feature f are:

    m1  OOB error after permuting f among each tree's OOB rows, minus
        the original OOB error (important features score positive)
    m2  mean decrease of the margin under the same permutation
    m3  (#rows whose margin decreased - #rows whose margin increased)
        divided by the number of OOB-covered rows
    m4  total Gini gain of splits on f, weighted by node sample count,
        divided by n_tree

Permutations are drawn per tree from streams seeded by (perm_seed, t).
"""

from __future__ import annotations

import warnings as _warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._tree import grow_tree, predict_rows
from .errors import (
    EmptySplit,
    InvalidConfig,
    NoOobCoverage,
    NoOobVotes,
    ShapeMismatch,
    SingleClassInput,
)
from .seeding import MAX_SEED

DEFAULT_N_TREE = 100
DEFAULT_MTRY = 5


@dataclass(frozen=True)
class ForestConfig:
    n_tree: int = DEFAULT_N_TREE
    mtry: int = DEFAULT_MTRY
    seed: int = 0
    min_node_size: int = 1

    def __post_init__(self):
        if self.n_tree < 1:
            raise InvalidConfig(f"n_tree must be >= 1, got {self.n_tree}")
        if self.mtry < 1:
            raise InvalidConfig(f"mtry must be >= 1, got {self.mtry}")
        if self.min_node_size < 1:
            raise InvalidConfig(f"min_node_size must be >= 1, got {self.min_node_size}")
        if not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise InvalidConfig(f"seed must be an integer in [0, 2**64), got {self.seed!r}")


class Tree:
    """One grown tree plus its bootstrap bag and OOB row indices."""

    __slots__ = ("feature", "threshold", "left", "right", "leaf",
                 "n_samples", "gain", "bag", "oob_rows")

    def __init__(self, arrays, bag, oob_rows):
        (self.feature, self.threshold, self.left, self.right,
         self.leaf, self.n_samples, self.gain) = arrays
        self.bag = bag
        self.oob_rows = oob_rows

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int((self.feature < 0).sum())

    def predict(self, X: np.ndarray) -> np.ndarray:
        return predict_rows(self.feature, self.threshold, self.left,
                            self.right, self.leaf, X)


@dataclass
class Forest:
    """A trained ensemble. Treat as immutable once returned."""

    trees: list[Tree]
    config: ForestConfig
    n_rows: int
    n_features: int
    labels: np.ndarray        # training labels, int8
    oob_votes: np.ndarray     # (n_rows, 2) accumulated OOB class votes


def gini_impurity(class_counts) -> float:
    """Gini impurity 1 - sum(p_k^2) of a node's class counts."""
    counts = np.asarray(class_counts, dtype=np.float64)
    if (counts < 0).any():
        raise ValueError("negative class count")
    total = counts.sum()
    if total <= 0:
        raise EmptySplit("impurity of an empty sample")
    proportions = counts / total
    return float(1.0 - (proportions * proportions).sum())


def _as_xy(matrix, labels):
    X = getattr(matrix, "values", matrix)
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeMismatch(f"expected a 2-d matrix, got ndim={X.ndim}")
    y = np.asarray(labels)
    if y.ndim != 1 or len(y) != X.shape[0]:
        raise ShapeMismatch(
            f"labels length {y.shape} does not match {X.shape[0]} matrix rows"
        )
    y = y.astype(bool).astype(np.int8)
    return X, y


def _run_indexed(worker, count, n_jobs):
    """Run worker(i) for i in range(count), results in index order."""
    if n_jobs == 1 or count <= 1:
        return [worker(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(worker, range(count)))


def train_forest(matrix, labels, config: ForestConfig, n_jobs: int = 1) -> Forest:
    """Train a forest on a feature matrix (or plain 2-d array).

    Raises SingleClassInput unless both classes are present, and
    ShapeMismatch / InvalidConfig for malformed inputs.
    """
    X, y = _as_xy(matrix, labels)
    n, p = X.shape
    if y.min() == y.max():
        raise SingleClassInput("training labels contain a single class")
    if config.mtry > p:
        raise InvalidConfig(f"mtry={config.mtry} exceeds {p} features")

    def build(t: int) -> tuple[Tree, np.ndarray]:
        rng = np.random.default_rng((config.seed, t))
        bag = rng.integers(0, n, n)
        feat_u = rng.random((2 * n + 1) * config.mtry)
        arrays = grow_tree(X, y, bag, feat_u, config.mtry, config.min_node_size)
        oob_rows = np.flatnonzero(np.bincount(bag, minlength=n) == 0)
        tree = Tree(arrays, bag, oob_rows)
        oob_pred = tree.predict(X[oob_rows])
        return tree, oob_pred

    results = _run_indexed(build, config.n_tree, n_jobs)
    votes = np.zeros((n, 2), dtype=np.int64)
    trees = []
    for tree, oob_pred in results:
        trees.append(tree)
        np.add.at(votes, (tree.oob_rows, oob_pred), 1)
    return Forest(trees=trees, config=config, n_rows=n, n_features=p,
                  labels=y, oob_votes=votes)


def predict_batch(forest: Forest, X) -> tuple[np.ndarray, np.ndarray]:
    """Majority-vote labels and vote fractions for each row of X.

    Ties go to the negative class. The fraction is the share of trees
    voting for the returned label.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != forest.n_features:
        raise ShapeMismatch(
            f"expected shape (*, {forest.n_features}), got {X.shape}"
        )
    n_tree = len(forest.trees)
    votes_pos = np.zeros(X.shape[0], dtype=np.int64)
    for tree in forest.trees:
        votes_pos += tree.predict(X)
    labels = votes_pos * 2 > n_tree
    frac = np.where(labels, votes_pos, n_tree - votes_pos) / n_tree
    return labels, frac


def predict(forest: Forest, x) -> tuple[bool, float]:
    """Classify a single feature vector: (label, vote fraction)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != forest.n_features:
        raise ShapeMismatch(f"expected a {forest.n_features}-vector, got {x.shape}")
    labels, frac = predict_batch(forest, x[None, :])
    return bool(labels[0]), float(frac[0])


def _margins_from_votes(votes: np.ndarray, y: np.ndarray):
    """Per-row margin and coverage mask from accumulated OOB votes."""
    total = votes.sum(axis=1)
    covered = total > 0
    correct = votes[np.arange(len(y)), y]
    margins = np.zeros(len(y), dtype=np.float64)
    margins[covered] = (2.0 * correct[covered] - total[covered]) / total[covered]
    return margins, covered


def oob_error(forest: Forest) -> float:
    """Fraction of OOB-covered rows whose OOB vote fails to pick the
    true class by strict majority (ties count as errors).

    Rows never out-of-bag are skipped with a warning; if no row has OOB
    votes, raises NoOobCoverage.
    """
    margins, covered = _margins_from_votes(forest.oob_votes, forest.labels)
    n_covered = int(covered.sum())
    if n_covered == 0:
        raise NoOobCoverage("no training row has out-of-bag votes")
    skipped = forest.n_rows - n_covered
    if skipped:
        _warnings.warn(f"{skipped} row(s) never out-of-bag; skipped in OOB error")
    return float(1.0 - (margins[covered] > 0).mean())


def margin(forest: Forest, row_index: int) -> float:
    """OOB margin of one training row: (correct - incorrect) / total votes."""
    votes = forest.oob_votes[row_index]
    total = int(votes.sum())
    if total == 0:
        raise NoOobVotes(f"row {row_index} has no out-of-bag votes")
    correct = int(votes[forest.labels[row_index]])
    return (2.0 * correct - total) / total


@dataclass
class Importance:
    """Per-feature values of the four importance measures (arrays of
    length n_features)."""

    m1: np.ndarray
    m2: np.ndarray
    m3: np.ndarray
    m4: np.ndarray

    def as_matrix(self) -> np.ndarray:
        """(n_features, 4) column-stacked measures."""
        return np.column_stack([self.m1, self.m2, self.m3, self.m4])


def importance(forest: Forest, matrix, labels, perm_seed: int,
               n_jobs: int = 1) -> Importance:
    """Compute the four importance measures on the forest's training data."""
    X, y = _as_xy(matrix, labels)
    if X.shape != (forest.n_rows, forest.n_features):
        raise ShapeMismatch(
            f"matrix shape {X.shape} does not match the trained forest "
            f"({forest.n_rows}, {forest.n_features})"
        )
    n, p = X.shape
    n_tree = len(forest.trees)

    def permute_tree(t: int):
        tree = forest.trees[t]
        rows = tree.oob_rows
        m = len(rows)
        if m == 0:
            return rows, None, None
        rng = np.random.default_rng((perm_seed, t))
        X_oob = X[rows]
        base_pred = tree.predict(X_oob)
        stacked = np.empty((p * m, p), dtype=np.float64)
        for f in range(p):
            block = stacked[f * m:(f + 1) * m]
            block[:] = X_oob
            block[:, f] = X_oob[rng.permutation(m), f]
        perm_pred = tree.predict(stacked).reshape(p, m)
        return rows, base_pred, perm_pred

    results = _run_indexed(permute_tree, n_tree, n_jobs)

    base_votes = np.zeros((n, 2), dtype=np.int64)
    perm_votes = np.zeros((p, n, 2), dtype=np.int64)
    for rows, base_pred, perm_pred in results:
        if base_pred is None:
            continue
        np.add.at(base_votes, (rows, base_pred), 1)
        for f in range(p):
            np.add.at(perm_votes[f], (rows, perm_pred[f]), 1)

    base_margins, covered = _margins_from_votes(base_votes, y)
    n_covered = int(covered.sum())
    if n_covered == 0:
        raise NoOobCoverage("no training row has out-of-bag votes")
    base_error = 1.0 - (base_margins[covered] > 0).mean()

    m1 = np.empty(p)
    m2 = np.empty(p)
    m3 = np.empty(p)
    for f in range(p):
        f_margins, _ = _margins_from_votes(perm_votes[f], y)
        m1[f] = (1.0 - (f_margins[covered] > 0).mean()) - base_error
        delta = base_margins[covered] - f_margins[covered]
        m2[f] = delta.mean()
        m3[f] = (int((delta > 0).sum()) - int((delta < 0).sum())) / n_covered

    m4 = np.zeros(p)
    for tree in forest.trees:
        internal = tree.feature >= 0
        np.add.at(m4, tree.feature[internal],
                  tree.gain[internal] * tree.n_samples[internal])
    m4 /= n_tree

    return Importance(m1=m1, m2=m2, m3=m3, m4=m4)


def forest_report(forest: Forest) -> str:
    """Deterministic structured-text dump for debugging."""
    node_counts = np.array([t.n_nodes for t in forest.trees])
    leaf_counts = np.array([t.n_leaves for t in forest.trees])
    covered = int((forest.oob_votes.sum(axis=1) > 0).sum())
    lines = [
        f"forest: n_tree={forest.config.n_tree} mtry={forest.config.mtry} "
        f"seed={forest.config.seed} min_node_size={forest.config.min_node_size}",
        f"data: rows={forest.n_rows} features={forest.n_features}",
        f"nodes per tree: min={node_counts.min()} max={node_counts.max()} "
        f"mean={node_counts.mean():.1f}",
        f"leaves per tree: min={leaf_counts.min()} max={leaf_counts.max()} "
        f"mean={leaf_counts.mean():.1f}",
        f"oob-covered rows: {covered}/{forest.n_rows}",
    ]
    if covered:
        margins_, covered_mask = _margins_from_votes(forest.oob_votes, forest.labels)
        err = 1.0 - (margins_[covered_mask] > 0).mean()
        lines.append(f"oob error: {err:.4f}")
    return "\n".join(lines) + "\n"
