"""On-disk corpus layout and session loading.

A corpus is a directory tree:

    corpus_root/
        labels.csv            participant_id,depression,anxiety,stress
        <participant_id>/
            task1.svc ... task7.svc

Participant directories are named by their id; task files by task
number. Sessions are returned sorted by participant id so every
downstream artifact is deterministic.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .dass import DassScores
from .errors import EmptyCorpus, MalformedRow
from .svc import TaskRecording, parse_svc
from .tasks import TaskId, task_filename

LABELS_FILENAME = "labels.csv"
LABELS_HEADER = ("participant_id", "depression", "anxiety", "stress")


@dataclass
class Session:
    """All data collected from one participant: scale scores plus up to
    seven task recordings (the map may be partial)."""

    participant_id: str
    scores: DassScores
    recordings: dict[TaskId, TaskRecording] = field(default_factory=dict)


def read_labels_csv(path: str | Path) -> dict[str, DassScores]:
    """Read the shared label file; returns id -> scores in file order."""
    path = Path(path)
    out: dict[str, DassScores] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(f"{path}: empty label file") from None
        if tuple(header) != LABELS_HEADER:
            raise MalformedRow(
                f"{path}: expected header {','.join(LABELS_HEADER)}, got {','.join(header)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise MalformedRow(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            pid = row[0]
            if pid in out:
                raise MalformedRow(f"{path}:{lineno}: duplicate participant id {pid!r}")
            try:
                dep, anx, str_ = (int(v) for v in row[1:])
            except ValueError:
                raise MalformedRow(f"{path}:{lineno}: non-integer score") from None
            out[pid] = DassScores(depression=dep, anxiety=anx, stress=str_)
    return out


def write_labels_csv(path: str | Path, scores_by_id: dict[str, DassScores]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LABELS_HEADER)
        for pid in sorted(scores_by_id):
            s = scores_by_id[pid]
            writer.writerow([pid, s.depression, s.anxiety, s.stress])


def load_session(
    directory: str | Path,
    participant_id: str,
    scores: DassScores,
    mode: str = "lenient",
) -> Session:
    """Load whichever task files exist in one participant directory."""
    directory = Path(directory)
    recordings: dict[TaskId, TaskRecording] = {}
    for task in TaskId:
        path = directory / task_filename(task)
        if path.is_file():
            recordings[task] = parse_svc(path.read_bytes(), mode=mode, task=task)
    return Session(participant_id=participant_id, scores=scores, recordings=recordings)


def load_corpus(root: str | Path, mode: str = "lenient") -> list[Session]:
    """Load a whole corpus, sorted by participant id.

    Participants are defined by the label file; directories without a
    label row are ignored. Missing task files simply leave gaps in the
    session's recording map (the feature-extraction policy decides what
    to do about them).
    """
    root = Path(root)
    labels = read_labels_csv(root / LABELS_FILENAME)
    if not labels:
        raise EmptyCorpus(f"{root}: label file lists no participants")
    sessions = []
    for pid in sorted(labels):
        sessions.append(load_session(root / pid, pid, labels[pid], mode=mode))
    return sessions
