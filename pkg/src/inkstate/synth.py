"""Seeded generator of synthetic corpora with plantable effects.

The real cohort is not distributable, so tests and demos run on
generated corpora that are format-identical to a real one: participant
directories of task1.svc..task7.svc plus a labels.csv, all passing
strict parse validation.

Recordings are alternating pen-down/pen-up runs. Per-participant label
flags are drawn from configured prevalences; scale scores are drawn
uniformly inside the band matching the flag, so dichotomizing the
written labels file always reproduces the ground truth. Effects are
multiplicative shifts on per-task generation parameters (pen-down
stroke duration, pen-up gap duration, stroke count) applied to
participants carrying the emotion, preserving the per-participant base
rate spread. Pen trajectories are integer random walks: geometry does
not enter any feature.

The two loop tasks are generated as a single pen-down run (they contain
no pen-up movement), which exercises their exclusion from the feature
matrix.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .corpus import LABELS_FILENAME, Session, write_labels_csv
from .dass import (
    DICHOTOMY_THRESHOLD,
    MAX_SCALE_SCORE,
    DassScores,
    EmotionLabels,
    Scale,
    SeverityLevel,
    dichotomize,
    severity_level,
)
from .errors import EmptyCorpus, InvalidConfig
from .features import COLUMN_NAMES, column_index
from .seeding import MAX_SEED
from .svc import PenStatus, SamplePoint, TaskRecording, serialize_svc
from .tasks import FEATURE_TASKS, LOOP_TASKS, TASK_LABELS, LABEL_TO_TASK, TaskId, task_filename

MANIFEST_FILENAME = "manifest.json"

EMOTIONS = ("depression", "anxiety", "stress")
EFFECT_PARAMS = ("in_air", "on_paper", "strokes")

_SCALE_BY_EMOTION = {
    "depression": Scale.DEPRESSION,
    "anxiety": Scale.ANXIETY,
    "stress": Scale.STRESS,
}

#: per task: mean pen-down runs, mean pen-down run ms, mean pen-up gap ms
BASE_TASK_PARAMS: dict[TaskId, tuple[int, int, int]] = {
    TaskId.PENTAGONS: (4, 1500, 900),
    TaskId.HOUSE: (8, 1100, 800),
    TaskId.HANDPRINT: (14, 600, 500),
    TaskId.LOOPS_LEFT: (1, 8000, 0),
    TaskId.LOOPS_RIGHT: (1, 7000, 0),
    TaskId.CLOCK: (7, 1200, 900),
    TaskId.CURSIVE: (6, 1300, 700),
}

DEFAULT_PREVALENCE: dict[str, float] = {
    "depression": 0.40,
    "anxiety": 0.45,
    "stress": 0.35,
}

#: default planted template: a strong depression effect on the three
#: drawing tasks' durations, milder anxiety/stress effects elsewhere
DEFAULT_EFFECTS: dict[str, dict[tuple[TaskId, str], float]] = {
    "depression": {
        (TaskId.PENTAGONS, "in_air"): 3.0,
        (TaskId.PENTAGONS, "on_paper"): 3.0,
        (TaskId.HOUSE, "in_air"): 3.0,
        (TaskId.HOUSE, "on_paper"): 3.0,
        (TaskId.CLOCK, "in_air"): 3.0,
        (TaskId.CLOCK, "on_paper"): 3.0,
    },
    "anxiety": {
        (TaskId.CURSIVE, "in_air"): 1.6,
        (TaskId.CLOCK, "on_paper"): 1.4,
    },
    "stress": {
        (TaskId.CLOCK, "in_air"): 1.7,
        (TaskId.CURSIVE, "strokes"): 1.5,
    },
}

_DURATION_SIGMA = 0.35    # lognormal spread of individual run durations
_TEMPO_SIGMA = 0.25       # lognormal spread of per-participant base rate


@dataclass(frozen=True)
class SynthConfig:
    n_participants: int = 129
    seed: int = 0
    label_prevalence: Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_PREVALENCE)
    )
    effects: Mapping[str, Mapping[tuple[TaskId, str], float]] = field(
        default_factory=lambda: {e: dict(v) for e, v in DEFAULT_EFFECTS.items()}
    )
    sampling_period_ms: int = 10

    def __post_init__(self):
        if self.n_participants < 1:
            raise InvalidConfig(f"n_participants must be >= 1, got {self.n_participants}")
        if not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise InvalidConfig(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        if self.sampling_period_ms < 1:
            raise InvalidConfig(
                f"sampling_period_ms must be >= 1, got {self.sampling_period_ms}"
            )
        for emotion in EMOTIONS:
            if emotion not in self.label_prevalence:
                raise InvalidConfig(f"label_prevalence missing {emotion!r}")
        for emotion, prev in self.label_prevalence.items():
            if emotion not in EMOTIONS:
                raise InvalidConfig(f"unknown emotion {emotion!r} in label_prevalence")
            if not 0.0 <= prev <= 1.0:
                raise InvalidConfig(f"prevalence for {emotion} must be in [0, 1], got {prev}")
        for emotion, shifts in self.effects.items():
            if emotion not in EMOTIONS:
                raise InvalidConfig(f"unknown emotion {emotion!r} in effects")
            for (task, param), shift in shifts.items():
                if task not in FEATURE_TASKS:
                    raise InvalidConfig(
                        f"effects may only target feature-bearing tasks, got {task!r}"
                    )
                if param not in EFFECT_PARAMS:
                    raise InvalidConfig(f"unknown effect parameter {param!r}")
                if not shift > 0:
                    raise InvalidConfig(f"effect shift must be > 0, got {shift}")


@dataclass
class SynthCorpus:
    sessions: list[Session]
    ground_truth: dict[str, EmotionLabels]
    manifest: dict


def planted_columns(config: SynthConfig, emotion: str) -> tuple[str, ...]:
    """Feature-matrix column names carrying a planted effect for one
    emotion, including the total-duration columns that duration shifts
    imply."""
    shifts = config.effects.get(emotion, {})
    indexed: set[int] = set()
    for (task, param), shift in shifts.items():
        if shift == 1.0:
            continue
        if param == "in_air":
            indexed.add(column_index(task, "in_air_ms"))
            indexed.add(column_index(task, "total_ms"))
        elif param == "on_paper":
            indexed.add(column_index(task, "on_paper_ms"))
            indexed.add(column_index(task, "total_ms"))
        else:
            indexed.add(column_index(task, "pen_strokes"))
    return tuple(COLUMN_NAMES[i] for i in sorted(indexed))


def _draw_score(rng: np.random.Generator, scale: Scale, flagged: bool) -> int:
    threshold = DICHOTOMY_THRESHOLD[scale]
    if flagged:
        return int(rng.integers(threshold + 1, MAX_SCALE_SCORE + 1))
    return int(rng.integers(0, threshold + 1))


def _draw_duration(rng: np.random.Generator, mean_ms: float) -> float:
    # lognormal with the requested mean
    mu = math.log(mean_ms) - 0.5 * _DURATION_SIGMA**2
    return float(rng.lognormal(mu, _DURATION_SIGMA))


def _generate_recording(
    rng: np.random.Generator,
    task: TaskId,
    tempo: float,
    shifts: dict[str, float],
    period: int,
) -> TaskRecording:
    base_strokes, base_stroke_ms, base_gap_ms = BASE_TASK_PARAMS[task]
    if task in LOOP_TASKS:
        n_strokes = 1
    else:
        n_strokes = max(1, int(rng.poisson(base_strokes * shifts["strokes"])))
    t = int(rng.integers(1_000_000, 50_000_000))
    pos = rng.integers(20_000, 60_000, size=2)
    x, y = int(pos[0]), int(pos[1])

    points: list[SamplePoint] = []
    for k in range(n_strokes):
        run_plan = [(PenStatus.ON_PAPER, base_stroke_ms * tempo * shifts["on_paper"])]
        if k < n_strokes - 1:
            run_plan.append((PenStatus.IN_AIR, base_gap_ms * tempo * shifts["in_air"]))
        for status, mean_ms in run_plan:
            duration = _draw_duration(rng, max(mean_ms, 2.0 * period))
            n_samples = max(2, round(duration / period))
            steps = rng.integers(-40, 41, size=(n_samples, 2))
            if status == PenStatus.ON_PAPER:
                pressures = rng.integers(80, 601, size=n_samples)
            else:
                pressures = np.zeros(n_samples, dtype=np.int64)
            for i in range(n_samples):
                x += int(steps[i, 0])
                y += int(steps[i, 1])
                points.append(
                    SamplePoint(x, y, t, status, 1870, 560, int(pressures[i]))
                )
                t += period
    return TaskRecording(
        points=tuple(points), task=task, declared_count=len(points)
    )


def generate_corpus(config: SynthConfig | None = None) -> SynthCorpus:
    """Generate a corpus; byte-identical output for identical configs.

    Participant i draws everything from a stream seeded by
    (config.seed, i), so generation order is irrelevant.
    """
    if config is None:
        config = SynthConfig()
    width = max(3, len(str(config.n_participants)))
    sessions: list[Session] = []
    ground_truth: dict[str, EmotionLabels] = {}

    for i in range(config.n_participants):
        rng = np.random.default_rng((config.seed, i))
        pid = f"p{i + 1:0{width}d}"
        flags = {
            emotion: bool(rng.random() < config.label_prevalence[emotion])
            for emotion in EMOTIONS
        }
        scores = DassScores(
            depression=_draw_score(rng, Scale.DEPRESSION, flags["depression"]),
            anxiety=_draw_score(rng, Scale.ANXIETY, flags["anxiety"]),
            stress=_draw_score(rng, Scale.STRESS, flags["stress"]),
        )
        tempo = float(np.exp(rng.normal(0.0, _TEMPO_SIGMA)))
        recordings = {}
        for task in TaskId:
            shifts = {param: 1.0 for param in EFFECT_PARAMS}
            for emotion in EMOTIONS:
                if not flags[emotion]:
                    continue
                for (etask, param), shift in config.effects.get(emotion, {}).items():
                    if etask == task:
                        shifts[param] *= shift
            recordings[task] = _generate_recording(
                rng, task, tempo, shifts, config.sampling_period_ms
            )
        sessions.append(Session(participant_id=pid, scores=scores, recordings=recordings))
        ground_truth[pid] = EmotionLabels(
            depressed=flags["depression"],
            anxious=flags["anxiety"],
            stressed=flags["stress"],
        )

    return SynthCorpus(
        sessions=sessions,
        ground_truth=ground_truth,
        manifest=build_manifest(config),
    )


def build_manifest(config: SynthConfig) -> dict:
    """JSON-serializable record of how the corpus was generated."""
    return {
        "n_participants": config.n_participants,
        "seed": config.seed,
        "sampling_period_ms": config.sampling_period_ms,
        "label_prevalence": dict(config.label_prevalence),
        "effects": {
            emotion: {
                f"{TASK_LABELS[task]}:{param}": shift
                for (task, param), shift in sorted(
                    shifts.items(), key=lambda kv: (kv[0][0], kv[0][1])
                )
            }
            for emotion, shifts in config.effects.items()
        },
        "base_task_params": {
            TASK_LABELS[task]: {
                "mean_strokes": params[0],
                "mean_stroke_ms": params[1],
                "mean_gap_ms": params[2],
            }
            for task, params in BASE_TASK_PARAMS.items()
        },
        "planted_columns": {
            emotion: list(planted_columns(config, emotion)) for emotion in EMOTIONS
        },
    }


def write_corpus(corpus: SynthCorpus, out_dir: str | Path) -> None:
    """Write the on-disk corpus layout plus the generation manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scores_by_id = {}
    for session in corpus.sessions:
        pdir = out_dir / session.participant_id
        pdir.mkdir(exist_ok=True)
        for task, recording in sorted(session.recordings.items()):
            (pdir / task_filename(task)).write_bytes(serialize_svc(recording))
        scores_by_id[session.participant_id] = session.scores
    write_labels_csv(out_dir / LABELS_FILENAME, scores_by_id)
    with open(out_dir / MANIFEST_FILENAME, "w") as fh:
        json.dump(corpus.manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def score_distribution_summary(corpus: SynthCorpus) -> dict:
    """Severity-band counts per scale plus dichotomized prevalences."""
    if not corpus.sessions:
        raise EmptyCorpus("no sessions in corpus")
    band_counts = {
        scale.value: {level.name: 0 for level in SeverityLevel} for scale in Scale
    }
    flag_counts = {emotion: 0 for emotion in EMOTIONS}
    for session in corpus.sessions:
        s = session.scores
        for scale, score in (
            (Scale.DEPRESSION, s.depression),
            (Scale.ANXIETY, s.anxiety),
            (Scale.STRESS, s.stress),
        ):
            band_counts[scale.value][severity_level(scale, score).name] += 1
        labels = dichotomize(s)
        flag_counts["depression"] += labels.depressed
        flag_counts["anxiety"] += labels.anxious
        flag_counts["stress"] += labels.stressed
    n = len(corpus.sessions)
    return {
        "n_participants": n,
        "band_counts": band_counts,
        "prevalence": {emotion: flag_counts[emotion] / n for emotion in EMOTIONS},
    }


def config_from_json(source) -> SynthConfig:
    """Build a SynthConfig from a JSON file path, JSON text, or dict.

    Effect keys are "<task>:<param>" strings, e.g. "clock:on_paper".
    """
    if isinstance(source, (str, Path)) and Path(str(source)).is_file():
        raw = json.loads(Path(source).read_text())
    elif isinstance(source, str):
        try:
            raw = json.loads(source)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"config is not valid JSON: {exc}") from None
    elif isinstance(source, dict):
        raw = source
    else:
        raise InvalidConfig(f"cannot read config from {source!r}")
    if not isinstance(raw, dict):
        raise InvalidConfig("config JSON must be an object")

    known = {
        "n_participants", "seed", "label_prevalence", "effects", "sampling_period_ms",
    }
    unknown = set(raw) - known
    if unknown:
        raise InvalidConfig(f"unknown config key(s): {', '.join(sorted(unknown))}")

    kwargs: dict = {}
    for key in ("n_participants", "seed", "sampling_period_ms"):
        if key in raw:
            if not isinstance(raw[key], int) or isinstance(raw[key], bool):
                raise InvalidConfig(f"{key} must be an integer")
            kwargs[key] = raw[key]
    if "label_prevalence" in raw:
        prevalence = dict(DEFAULT_PREVALENCE)
        if not isinstance(raw["label_prevalence"], dict):
            raise InvalidConfig("label_prevalence must be an object")
        for emotion, value in raw["label_prevalence"].items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise InvalidConfig(f"prevalence for {emotion!r} must be a number")
            prevalence[emotion] = float(value)
        kwargs["label_prevalence"] = prevalence
    if "effects" in raw:
        if not isinstance(raw["effects"], dict):
            raise InvalidConfig("effects must be an object")
        effects: dict[str, dict[tuple[TaskId, str], float]] = {}
        for emotion, shifts in raw["effects"].items():
            if not isinstance(shifts, dict):
                raise InvalidConfig(f"effects[{emotion!r}] must be an object")
            parsed: dict[tuple[TaskId, str], float] = {}
            for key, shift in shifts.items():
                parts = key.split(":")
                if len(parts) != 2:
                    raise InvalidConfig(
                        f"effect key must be '<task>:<param>', got {key!r}"
                    )
                task_label, param = parts
                if task_label not in LABEL_TO_TASK:
                    raise InvalidConfig(f"unknown task {task_label!r} in effect key")
                if not isinstance(shift, (int, float)) or isinstance(shift, bool):
                    raise InvalidConfig(f"effect shift for {key!r} must be a number")
                parsed[(LABEL_TO_TASK[task_label], param)] = float(shift)
            effects[emotion] = parsed
        kwargs["effects"] = effects
    return SynthConfig(**kwargs)
