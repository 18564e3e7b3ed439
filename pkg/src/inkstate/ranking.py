"""Feature ranking by aggregating importance ranks over a forest ensemble.

A single forest's importance values wobble with its randomness, so an
ensemble of ``n_forests`` independently seeded forests is built. Inside
each forest, features are ranked per measure (rank 1 = most important,
ties broken by lower feature index); the four ranks of all forests are
summed per feature, and the final order is ascending rank sum: the
lower the sum, the better the feature.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import KTooLarge, ShapeMismatch
from .features import COLUMN_NAMES, DISPLAY_NAMES
from .forest import ForestConfig, Importance, importance, train_forest
from .seeding import derive_seed_pair

DEFAULT_N_FORESTS = 50


@dataclass(frozen=True)
class RankConfig:
    """``forest.seed`` acts as the master seed; forest i trains with a
    child seed derived from (master, i)."""

    n_forests: int = DEFAULT_N_FORESTS
    forest: ForestConfig = field(default_factory=ForestConfig)

    def __post_init__(self):
        if self.n_forests < 1:
            raise ValueError(f"n_forests must be >= 1, got {self.n_forests}")


@dataclass
class RankReport:
    column_names: tuple[str, ...]
    display_names: tuple[str, ...]
    rank_sum: np.ndarray          # int, per feature
    mean_ranks: np.ndarray        # (n_features, 4) mean rank per measure
    final_rank: np.ndarray        # permutation of 1..n_features
    n_forests: int

    @property
    def n_features(self) -> int:
        return len(self.column_names)


def measure_ranks(imp: Importance) -> np.ndarray:
    """(n_features, 4) ranks, one column per measure; rank 1 is the most
    important feature, ties broken by lower feature index."""
    values = imp.as_matrix()
    p = values.shape[0]
    ranks = np.empty((p, 4), dtype=np.int64)
    indices = np.arange(p)
    for k in range(4):
        order = np.lexsort((indices, -values[:, k]))
        ranks[order, k] = indices + 1
    return ranks


def aggregate_ranks(
    importances: list[Importance],
    column_names: tuple[str, ...] = COLUMN_NAMES,
    display_names: tuple[str, ...] | None = None,
) -> RankReport:
    """Sum per-measure ranks over any list of per-forest importances."""
    if not importances:
        raise ValueError("no importances to aggregate")
    p = len(column_names)
    if display_names is None:
        display_names = DISPLAY_NAMES if column_names == COLUMN_NAMES else column_names
    per_forest = []
    for imp in importances:
        if len(imp.m1) != p:
            raise ShapeMismatch(
                f"importance has {len(imp.m1)} features, expected {p}"
            )
        per_forest.append(measure_ranks(imp))
    stacked = np.stack(per_forest)                # (n_forests, p, 4)
    rank_sum = stacked.sum(axis=(0, 2))
    mean_ranks = stacked.mean(axis=0)
    final_rank = np.empty(p, dtype=np.int64)
    order = np.lexsort((np.arange(p), rank_sum))
    final_rank[order] = np.arange(1, p + 1)
    return RankReport(
        column_names=tuple(column_names),
        display_names=tuple(display_names),
        rank_sum=rank_sum,
        mean_ranks=mean_ranks,
        final_rank=final_rank,
        n_forests=len(importances),
    )


def rank_features(matrix, labels, config: RankConfig | None = None,
                  n_jobs: int = 1) -> RankReport:
    """Train the forest ensemble and aggregate importance ranks.

    Deterministic for a given master seed: forest i uses a training
    seed and a permutation seed both derived from (master, i).
    """
    if config is None:
        config = RankConfig()
    column_names = getattr(matrix, "column_names", None)
    if column_names is None:
        X = np.asarray(matrix)
        column_names = tuple(f"f{j}" for j in range(X.shape[1]))

    def one_forest(i: int) -> Importance:
        train_seed, perm_seed = derive_seed_pair(config.forest.seed, i)
        forest = train_forest(matrix, labels, replace(config.forest, seed=train_seed))
        return importance(forest, matrix, labels, perm_seed)

    if n_jobs == 1 or config.n_forests == 1:
        importances = [one_forest(i) for i in range(config.n_forests)]
    else:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            importances = list(pool.map(one_forest, range(config.n_forests)))
    return aggregate_ranks(importances, column_names=tuple(column_names))


def top_k_table(report: RankReport, k: int = 10) -> list[tuple[str, int]]:
    """The k best features as (display name, rank sum), best first."""
    if k > report.n_features:
        raise KTooLarge(f"k={k} exceeds {report.n_features} features")
    if k < 0:
        raise KTooLarge(f"k must be >= 0, got {k}")
    order = np.argsort(report.final_rank)
    return [
        (report.display_names[j], int(report.rank_sum[j]))
        for j in order[:k]
    ]


def write_rank_csv(path: str | Path, report: RankReport) -> None:
    """Full ranking as CSV, best feature first."""
    order = np.argsort(report.final_rank)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([
            "feature", "rank_sum", "final_rank",
            "m1_mean_rank", "m2_mean_rank", "m3_mean_rank", "m4_mean_rank",
        ])
        for j in order:
            writer.writerow(
                [report.column_names[j], int(report.rank_sum[j]),
                 int(report.final_rank[j])]
                + [f"{report.mean_ranks[j, k]:.2f}" for k in range(4)]
            )


def format_rank_table(report: RankReport, k: int = 10) -> str:
    """Human-readable top-k table."""
    entries = top_k_table(report, k)
    width = max(len(name) for name, _ in entries) if entries else 0
    lines = [f"{'rank':>4}  {'feature':<{width}}  rank_sum"]
    for pos, (name, rank_sum) in enumerate(entries, start=1):
        lines.append(f"{pos:>4}  {name:<{width}}  {rank_sum}")
    return "\n".join(lines) + "\n"
