"""Timing and ductus features per task, and the assembled feature matrix.

Four features per feature-bearing task:

    in_air_ms     time spent with the pen lifted during the task
    on_paper_ms   time spent with the pen touching during the task
    total_ms      wall time from first to last sample
    pen_strokes   number of maximal pen-down runs

Each inter-sample interval is attributed to the pen status of its
*earlier* sample, which makes in_air_ms + on_paper_ms == total_ms an
exact identity and charges unregistered in-air gaps (the tablet stops
recording when the pen is too high) to in-air time, which is where the
pen actually was.

The matrix has one row per participant (sorted by id) and 20 columns in
a fixed task-major order: tasks (pentagons, house, handprint, clock,
cursive) x features (in_air_ms, on_paper_ms, total_ms, pen_strokes).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Session
from .errors import EmptyCorpus, MalformedRow, MissingTask
from .svc import PenStatus, TaskRecording
from .tasks import FEATURE_TASKS, TASK_LABELS, TaskId

FEATURE_FIELDS = ("in_air_ms", "on_paper_ms", "total_ms", "pen_strokes")
_FEATURE_DISPLAY = {
    "in_air_ms": "in-air duration",
    "on_paper_ms": "on-paper duration",
    "total_ms": "total duration",
    "pen_strokes": "pen-down strokes",
}

#: canonical 20-column order: task-major, feature-minor
COLUMN_NAMES: tuple[str, ...] = tuple(
    f"{TASK_LABELS[task]}_{feat}" for task in FEATURE_TASKS for feat in FEATURE_FIELDS
)

#: e.g. "in-air duration (clock)" for human-readable tables
DISPLAY_NAMES: tuple[str, ...] = tuple(
    f"{_FEATURE_DISPLAY[feat]} ({TASK_LABELS[task]})"
    for task in FEATURE_TASKS
    for feat in FEATURE_FIELDS
)

ASSEMBLY_POLICIES = ("strict", "drop_participant")


def column_index(task: TaskId, feature_field: str) -> int:
    """Position of a (task, feature) pair in the canonical column order."""
    return COLUMN_NAMES.index(f"{TASK_LABELS[task]}_{feature_field}")


@dataclass(frozen=True, slots=True)
class TaskFeatures:
    in_air_ms: int
    on_paper_ms: int
    total_ms: int
    pen_strokes: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.in_air_ms, self.on_paper_ms, self.total_ms, self.pen_strokes)


def extract_task_features(recording: TaskRecording) -> TaskFeatures:
    """Compute the four features of one recording.

    Empty and single-point recordings span no time, so all duration
    features are 0; the stroke count of a single pen-down point is 1.
    """
    points = recording.points
    n = len(points)
    if n == 0:
        return TaskFeatures(0, 0, 0, 0)
    t = np.fromiter((p.timestamp for p in points), dtype=np.int64, count=n)
    status = np.fromiter((int(p.pen_status) for p in points), dtype=np.int8, count=n)
    strokes = int(status[0] == 1) + int(((status[1:] == 1) & (status[:-1] == 0)).sum())
    if n == 1:
        return TaskFeatures(0, 0, 0, strokes)
    dt = np.diff(t)
    on_paper = int(dt[status[:-1] == 1].sum())
    in_air = int(dt[status[:-1] == 0].sum())
    total = int(t[-1] - t[0])
    return TaskFeatures(in_air, on_paper, total, strokes)


@dataclass
class FeatureMatrix:
    """Participants x 20 feature values, in canonical column order.

    Values are integer milliseconds (counts for the stroke columns).
    """

    participant_ids: tuple[str, ...]
    values: np.ndarray
    warnings: tuple[str, ...] = ()
    column_names: tuple[str, ...] = field(default=COLUMN_NAMES)

    @property
    def n_participants(self) -> int:
        return len(self.participant_ids)


def assemble_feature_matrix(
    sessions: list[Session],
    policy: str = "strict",
) -> FeatureMatrix:
    """Build the feature matrix from loaded sessions.

    Loop-task recordings are ignored even when present. Under the
    ``strict`` policy a session missing any feature-bearing task raises
    MissingTask; under ``drop_participant`` that session is excluded and
    a warning is recorded on the result.
    """
    if policy not in ASSEMBLY_POLICIES:
        raise ValueError(f"policy must be one of {ASSEMBLY_POLICIES}, got {policy!r}")
    if not sessions:
        raise EmptyCorpus("no sessions to assemble")

    ordered = sorted(sessions, key=lambda s: s.participant_id)
    seen: set[str] = set()
    ids: list[str] = []
    rows: list[list[int]] = []
    warnings: list[str] = []
    for session in ordered:
        if session.participant_id in seen:
            raise MalformedRow(f"duplicate participant id {session.participant_id!r}")
        seen.add(session.participant_id)
        missing = [t for t in FEATURE_TASKS if t not in session.recordings]
        if missing:
            names = ", ".join(TASK_LABELS[t] for t in missing)
            if policy == "strict":
                raise MissingTask(
                    f"participant {session.participant_id}: missing task(s) {names}"
                )
            warnings.append(
                f"participant {session.participant_id} dropped: missing task(s) {names}"
            )
            continue
        row: list[int] = []
        for task in FEATURE_TASKS:
            row.extend(extract_task_features(session.recordings[task]).as_tuple())
        ids.append(session.participant_id)
        rows.append(row)

    values = np.asarray(rows, dtype=np.int64).reshape(len(rows), len(COLUMN_NAMES))
    return FeatureMatrix(
        participant_ids=tuple(ids), values=values, warnings=tuple(warnings)
    )


def write_feature_csv(path: str | Path, matrix: FeatureMatrix) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("participant_id",) + tuple(matrix.column_names))
        for pid, row in zip(matrix.participant_ids, matrix.values):
            writer.writerow([pid] + [int(v) for v in row])


def read_feature_csv(path: str | Path) -> FeatureMatrix:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(f"{path}: empty feature file") from None
        expected = ("participant_id",) + COLUMN_NAMES
        if tuple(header) != expected:
            raise MalformedRow(f"{path}: unexpected header {','.join(header)}")
        ids: list[str] = []
        rows: list[list[int]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected):
                raise MalformedRow(
                    f"{path}:{lineno}: expected {len(expected)} columns, got {len(row)}"
                )
            ids.append(row[0])
            try:
                rows.append([int(v) for v in row[1:]])
            except ValueError:
                raise MalformedRow(f"{path}:{lineno}: non-integer feature value") from None
    values = np.asarray(rows, dtype=np.int64).reshape(len(rows), len(COLUMN_NAMES))
    return FeatureMatrix(participant_ids=tuple(ids), values=values)
