"""Command-line front end.

Subcommands: validate, features, rank, cv, synth, crosstab. Every
command is deterministic given its seed flags; nothing reads the clock
or process state. Exit codes: 0 success, 1 validation/processing
failure, 2 usage error. The INKSTATE_CORPUS environment variable
supplies a default corpus root for validate/features.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .corpus import LABELS_FILENAME, load_corpus, read_labels_csv
from .dass import LabelPair, chi_square_2x2, cross_tabulate, dichotomize
from .errors import DegenerateMarginal, EmptyCorpus, IdMismatch, InkstateError
from .evaluation import format_cv_report, repeated_cv, write_cv_csv
from .features import (
    FeatureMatrix,
    assemble_feature_matrix,
    column_index,
    read_feature_csv,
    write_feature_csv,
)
from .forest import ForestConfig
from .ranking import RankConfig, format_rank_table, rank_features, write_rank_csv
from .svc import parse_svc
from .synth import SynthConfig, config_from_json, generate_corpus, write_corpus
from .tasks import FEATURE_TASKS, TASK_LABELS, TaskId, task_filename

CORPUS_ENV_VAR = "INKSTATE_CORPUS"

TARGETS = ("depression", "anxiety", "stress")

_LABEL_FIELD = {
    "depression": "depressed",
    "anxiety": "anxious",
    "stress": "stressed",
}


def _corpus_path(args, parser) -> Path:
    if args.corpus is not None:
        return Path(args.corpus)
    env = os.environ.get(CORPUS_ENV_VAR)
    if env:
        return Path(env)
    parser.error(f"no corpus path given and {CORPUS_ENV_VAR} is not set")


def _forest_config(args) -> ForestConfig:
    return ForestConfig(
        n_tree=args.n_tree,
        mtry=args.mtry,
        seed=args.seed,
        min_node_size=args.min_node_size,
    )


def _add_forest_flags(sub) -> None:
    sub.add_argument("--seed", type=int, default=0, help="master random seed")
    sub.add_argument("--n-tree", type=int, default=100, help="trees per forest")
    sub.add_argument("--mtry", type=int, default=5,
                     help="candidate features per split node")
    sub.add_argument("--min-node-size", type=int, default=1,
                     help="do not split nodes at or below this size")


def _aligned_labels(matrix: FeatureMatrix, labels_path, target: str):
    """Dichotomized boolean labels for one target, aligned to matrix rows."""
    scores_by_id = read_labels_csv(labels_path)
    matrix_ids = set(matrix.participant_ids)
    label_ids = set(scores_by_id)
    if matrix_ids != label_ids:
        missing = sorted(matrix_ids - label_ids)[:5]
        extra = sorted(label_ids - matrix_ids)[:5]
        raise IdMismatch(
            f"feature/label participant ids disagree "
            f"(missing from labels: {missing}, extra in labels: {extra})"
        )
    field = _LABEL_FIELD[target]
    return [
        getattr(dichotomize(scores_by_id[pid]), field)
        for pid in matrix.participant_ids
    ]


def _sorted_matrix(matrix: FeatureMatrix) -> FeatureMatrix:
    order = sorted(range(matrix.n_participants),
                   key=lambda i: matrix.participant_ids[i])
    return FeatureMatrix(
        participant_ids=tuple(matrix.participant_ids[i] for i in order),
        values=matrix.values[order],
        warnings=matrix.warnings,
        column_names=matrix.column_names,
    )


# --- validate -----------------------------------------------------------

def cmd_validate(args, parser) -> int:
    root = _corpus_path(args, parser)
    if not root.is_dir():
        print(f"error: {root} is not a directory", file=sys.stderr)
        return 1
    participant_dirs = sorted(p.name for p in root.iterdir() if p.is_dir())
    labels_path = root / LABELS_FILENAME
    failures = 0
    warns = 0

    def report(status: str, path: str, detail: str = "") -> None:
        suffix = f"  {detail}" if detail else ""
        print(f"{status:4s} {path}{suffix}")

    label_ids: dict = {}
    if labels_path.is_file():
        try:
            label_ids = read_labels_csv(labels_path)
            report("PASS", LABELS_FILENAME, f"{len(label_ids)} participants")
        except InkstateError as exc:
            report("FAIL", LABELS_FILENAME, str(exc))
            failures += 1
    else:
        report("FAIL", LABELS_FILENAME, "missing")
        failures += 1

    if not participant_dirs and not label_ids:
        print(f"error: empty corpus at {root}", file=sys.stderr)
        return 1

    for pid in sorted(set(participant_dirs) | set(label_ids)):
        pdir = root / pid
        if pid not in label_ids:
            report("WARN", pid + "/", "directory has no label row")
            warns += 1
        if not pdir.is_dir():
            report("WARN", pid + "/", "label row has no directory")
            warns += 1
            continue
        for task in TaskId:
            fpath = pdir / task_filename(task)
            rel = f"{pid}/{task_filename(task)}"
            if not fpath.is_file():
                report("WARN", rel, "missing")
                warns += 1
                continue
            try:
                recording = parse_svc(fpath.read_bytes(), mode=args.mode, task=task)
            except InkstateError as exc:
                report("FAIL", rel, f"{type(exc).__name__}: {exc}")
                failures += 1
                continue
            if recording.warnings:
                report("WARN", rel, recording.warnings[0])
                warns += 1
            else:
                report("PASS", rel)

    print(f"validated: {failures} failure(s), {warns} warning(s)")
    return 1 if failures else 0


# --- features -----------------------------------------------------------

def cmd_features(args, parser) -> int:
    root = _corpus_path(args, parser)
    sessions = load_corpus(root, mode=args.mode)
    policy = "drop_participant" if args.policy == "drop" else "strict"
    matrix = assemble_feature_matrix(sessions, policy=policy)
    for warning in matrix.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if matrix.n_participants == 0:
        raise EmptyCorpus("no participants left after applying the policy")
    write_feature_csv(args.out, matrix)
    print(f"wrote {matrix.n_participants} x {len(matrix.column_names)} "
          f"feature matrix to {args.out}")
    scale = args.time_scale
    print("mean durations per task "
          f"(unit = {scale:g} ms{', i.e. seconds' if scale == 0.001 else ''}):")
    for task in FEATURE_TASKS:
        col = column_index(task, "total_ms")
        mean_total = matrix.values[:, col].mean() * scale
        print(f"  {TASK_LABELS[task]:<10} {mean_total:8.1f}")
    return 0


# --- rank ---------------------------------------------------------------

def cmd_rank(args, parser) -> int:
    matrix = _sorted_matrix(read_feature_csv(args.features))
    labels = _aligned_labels(matrix, args.labels, args.target)
    config = RankConfig(n_forests=args.n_forests, forest=_forest_config(args))
    report = rank_features(matrix, labels, config, n_jobs=args.jobs)
    print(f"feature ranking for target '{args.target}' "
          f"({config.n_forests} forests x {config.forest.n_tree} trees):")
    print(format_rank_table(report, k=min(args.top, report.n_features)), end="")
    if args.out:
        write_rank_csv(args.out, report)
        print(f"wrote full ranking to {args.out}")
    return 0


# --- cv -----------------------------------------------------------------

def cmd_cv(args, parser) -> int:
    matrix = _sorted_matrix(read_feature_csv(args.features))
    targets = TARGETS if args.target == "all" else (args.target,)
    reports = []
    for target in targets:
        labels = _aligned_labels(matrix, args.labels, target)
        report = repeated_cv(
            matrix, labels, _forest_config(args),
            reps=args.reps, master_seed=args.seed, target=target,
            n_jobs=args.jobs,
        )
        reports.append(report)
        print(format_cv_report(report), end="")
    if args.out:
        write_cv_csv(args.out, reports)
        print(f"wrote cv report to {args.out}")
    return 0


# --- synth --------------------------------------------------------------

def cmd_synth(args, parser) -> int:
    if args.config:
        config = config_from_json(args.config)
    else:
        config = SynthConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.participants is not None:
        overrides["n_participants"] = args.participants
    if overrides:
        config = replace(config, **overrides)
    corpus = generate_corpus(config)
    write_corpus(corpus, args.out)
    print(f"wrote {config.n_participants} participant(s) to {args.out}")
    for emotion, cols in corpus.manifest["planted_columns"].items():
        if cols:
            print(f"  planted ({emotion}): {', '.join(cols)}")
    return 0


# --- crosstab -----------------------------------------------------------

def cmd_crosstab(args, parser) -> int:
    scores_by_id = read_labels_csv(args.labels)
    if not scores_by_id:
        raise EmptyCorpus(f"{args.labels} lists no participants")
    labels = [dichotomize(scores_by_id[pid]) for pid in sorted(scores_by_id)]
    for pair in LabelPair:
        first, second = pair.value
        table = cross_tabulate(labels, pair)
        counts = table.counts
        pct = table.percentages
        print(f"{first} x {second} (n={table.n})")
        header = f"{'':14s}{'no ' + second:>16s}{'yes ' + second:>16s}"
        print(header)
        for i, row_name in enumerate((f"no {first}", f"yes {first}")):
            cells = "".join(
                f"{counts[i, j]:>7d} ({pct[i, j]:4.1f}%)" for j in range(2)
            )
            print(f"  {row_name:<12s}{cells}")
        try:
            statistic, p_value = chi_square_2x2(counts)
            print(f"  chi-square = {statistic:.4f}  p = {p_value:.3g}")
        except DegenerateMarginal as exc:
            print(f"  chi-square skipped: {exc}")
        print()
    return 0


# --- parser -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inkstate",
        description="Tablet-handwriting timing analysis and "
                    "emotional-state classification.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check every corpus file parses")
    p.add_argument("corpus", nargs="?", help=f"corpus root (default ${CORPUS_ENV_VAR})")
    p.add_argument("--mode", choices=("strict", "lenient"), default="strict")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("features", help="extract the feature matrix to CSV")
    p.add_argument("corpus", nargs="?", help=f"corpus root (default ${CORPUS_ENV_VAR})")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--policy", choices=("strict", "drop"), default="strict",
                   help="what to do about sessions missing a feature task")
    p.add_argument("--mode", choices=("strict", "lenient"), default="lenient",
                   help="parse mode for the SVC files")
    p.add_argument("--time-scale", type=float, default=0.001,
                   help="duration unit for the printed summary, in ms")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("rank", help="aggregate feature importance ranks")
    p.add_argument("--features", required=True, help="feature matrix CSV")
    p.add_argument("--labels", required=True, help="label CSV")
    p.add_argument("--target", choices=TARGETS, required=True)
    p.add_argument("--n-forests", type=int, default=50)
    p.add_argument("--top", type=int, default=10, help="rows in the printed table")
    p.add_argument("--out", help="write the full ranking CSV here")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    _add_forest_flags(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("cv", help="repeated leave-one-out cross-validation")
    p.add_argument("--features", required=True, help="feature matrix CSV")
    p.add_argument("--labels", required=True, help="label CSV")
    p.add_argument("--target", choices=TARGETS + ("all",), default="all")
    p.add_argument("--reps", type=int, default=10, help="LOOCV repetitions")
    p.add_argument("--out", help="write the report CSV here")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    _add_forest_flags(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--out", required=True, help="corpus output directory")
    p.add_argument("--config", help="generator config JSON")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--participants", type=int, help="override participant count")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("crosstab", help="label co-occurrence tables and chi-square")
    p.add_argument("--labels", required=True, help="label CSV")
    p.set_defaults(func=cmd_crosstab)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (InkstateError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
