"""Repeated leave-one-out cross-validation of forest classifiers.

One LOOCV pass trains on all rows but one and tests the held-out row,
once per row. Because forests are random, the pass is repeated ``reps``
times with repetition seeds derived from a master seed, and the
accuracies are summarized by their mean and five-number summary.

Fold seeds are derived from (repetition seed, participant id), and each
fold's training rows are put in participant-id order before training,
so results are invariant to the row order of the input matrix.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import TooFewRows
from .forest import ForestConfig, predict_batch, train_forest
from .seeding import derive_seed, participant_key

DEFAULT_REPS = 10


@dataclass
class CvReport:
    """Accuracy summary of repeated LOOCV for one target state."""

    target: str
    accuracies: tuple[float, ...]
    mean: float
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    recall_positive: float
    recall_negative: float
    warnings: tuple[str, ...] = ()

    @property
    def reps(self) -> int:
        return len(self.accuracies)


def _canonical_order(matrix, labels):
    X = getattr(matrix, "values", matrix)
    X = np.ascontiguousarray(X, dtype=np.float64)
    ids = getattr(matrix, "participant_ids", None)
    if ids is None:
        ids = tuple(f"{i:06d}" for i in range(X.shape[0]))
    y = np.asarray(labels).astype(bool).astype(np.int8)
    if len(y) != X.shape[0]:
        raise TooFewRows(
            f"labels length {len(y)} does not match {X.shape[0]} rows"
        )
    order = np.argsort(np.array(ids, dtype=object), kind="stable")
    return X[order], y[order], tuple(ids[i] for i in order)


def _loocv_predictions(X, y, ids, forest_config, rep_seed, n_jobs=1):
    """Held-out prediction for every row; single-class folds fall back
    to the training majority (ties to the negative class)."""
    n = len(y)
    mask = np.ones(n, dtype=bool)

    def one_fold(j: int) -> tuple[bool, bool]:
        mask_j = mask.copy()
        mask_j[j] = False
        X_train, y_train = X[mask_j], y[mask_j]
        if y_train.min() == y_train.max():
            pos = int(y_train.sum())
            return bool(pos * 2 > len(y_train)), True
        fold_seed = derive_seed(rep_seed, participant_key(ids[j]))
        forest = train_forest(X_train, y_train,
                              replace(forest_config, seed=fold_seed))
        labels_pred, _ = predict_batch(forest, X[j][None, :])
        return bool(labels_pred[0]), False

    if n_jobs == 1:
        results = [one_fold(j) for j in range(n)]
    else:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(one_fold, range(n)))

    preds = np.array([r[0] for r in results], dtype=bool)
    n_fallback = sum(1 for r in results if r[1])
    return preds, n_fallback


def loocv(matrix, labels, forest_config: ForestConfig, rep_seed: int = 0,
          n_jobs: int = 1) -> float:
    """Accuracy of one leave-one-out pass (K = number of rows)."""
    X, y, ids = _canonical_order(matrix, labels)
    if len(y) < 2:
        raise TooFewRows(f"need at least 2 rows, got {len(y)}")
    preds, _ = _loocv_predictions(X, y, ids, forest_config, rep_seed, n_jobs)
    return float((preds == y.astype(bool)).mean())


def repeated_cv(matrix, labels, forest_config: ForestConfig,
                reps: int = DEFAULT_REPS, master_seed: int = 0,
                target: str = "", n_jobs: int = 1) -> CvReport:
    """Run ``reps`` LOOCV passes and summarize their accuracies.

    Repetition r derives its seed from (master_seed, r); the whole
    report is deterministic for a given master seed and thread count
    has no effect on the numbers.
    """
    X, y, ids = _canonical_order(matrix, labels)
    if len(y) < 2:
        raise TooFewRows(f"need at least 2 rows, got {len(y)}")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")

    y_bool = y.astype(bool)
    accuracies = []
    recalls_pos = []
    recalls_neg = []
    warnings: list[str] = []
    total_fallbacks = 0
    for r in range(reps):
        rep_seed = derive_seed(master_seed, r)
        preds, n_fallback = _loocv_predictions(
            X, y, ids, forest_config, rep_seed, n_jobs
        )
        total_fallbacks += n_fallback
        accuracies.append(float((preds == y_bool).mean()))
        pos = y_bool
        recalls_pos.append(float((preds[pos]).mean()) if pos.any() else np.nan)
        recalls_neg.append(float((~preds[~pos]).mean()) if (~pos).any() else np.nan)
    if total_fallbacks:
        warnings.append(
            f"{total_fallbacks} fold(s) had single-class training data; "
            "majority fallback used"
        )

    acc = np.asarray(accuracies)
    q1, med, q3 = np.quantile(acc, [0.25, 0.5, 0.75])
    return CvReport(
        target=target,
        accuracies=tuple(accuracies),
        mean=float(acc.mean()),
        minimum=float(acc.min()),
        q1=float(q1),
        median=float(med),
        q3=float(q3),
        maximum=float(acc.max()),
        recall_positive=float(np.mean(recalls_pos)),
        recall_negative=float(np.mean(recalls_neg)),
        warnings=tuple(warnings),
    )


def format_cv_report(report: CvReport) -> str:
    pct = lambda v: f"{100.0 * v:5.1f}%"
    lines = [
        f"target: {report.target or '(unnamed)'}",
        f"  mean accuracy over {report.reps} repetition(s): {pct(report.mean)}",
        f"  min {pct(report.minimum)}  q1 {pct(report.q1)}  "
        f"median {pct(report.median)}  q3 {pct(report.q3)}  max {pct(report.maximum)}",
        f"  recall: positive {pct(report.recall_positive)}  "
        f"negative {pct(report.recall_negative)}",
    ]
    for w in report.warnings:
        lines.append(f"  warning: {w}")
    return "\n".join(lines) + "\n"


def write_cv_csv(path: str | Path, reports: list[CvReport]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([
            "target", "mean", "min", "q1", "median", "q3", "max",
            "recall_positive", "recall_negative", "accuracies",
        ])
        for rep in reports:
            writer.writerow([
                rep.target,
                f"{rep.mean:.6f}", f"{rep.minimum:.6f}", f"{rep.q1:.6f}",
                f"{rep.median:.6f}", f"{rep.q3:.6f}", f"{rep.maximum:.6f}",
                f"{rep.recall_positive:.6f}", f"{rep.recall_negative:.6f}",
                " ".join(f"{a:.6f}" for a in rep.accuracies),
            ])
