"""DASS-42 scale scoring: severity bands, dichotomized labels, and
co-occurrence analysis of the three negative emotional states.

Each of the three self-report scales (depression, anxiety, stress) has
14 items scored 0-3, so scale totals live in [0, 42]. Severity bands
differ per scale; a participant counts as depressed/anxious/stressed
exactly when the matching score leaves the Normal band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np

from .errors import DegenerateMarginal, EmptyInput, ScoreOutOfRange

MAX_SCALE_SCORE = 42


class Scale(Enum):
    DEPRESSION = "depression"
    ANXIETY = "anxiety"
    STRESS = "stress"


class SeverityLevel(IntEnum):
    NORMAL = 0
    MILD = 1
    MODERATE = 2
    SEVERE = 3
    EXTREMELY_SEVERE = 4


# lower score bound of each band, per scale, ordered Normal -> Extremely Severe
_BAND_LOWER = {
    Scale.DEPRESSION: (0, 10, 14, 21, 28),
    Scale.ANXIETY: (0, 8, 10, 15, 20),
    Scale.STRESS: (0, 15, 19, 26, 34),
}

#: score strictly above this bound means the negative state is present
DICHOTOMY_THRESHOLD = {
    Scale.DEPRESSION: 9,
    Scale.ANXIETY: 7,
    Scale.STRESS: 14,
}


def _check_score(score: int) -> None:
    if not isinstance(score, int) or isinstance(score, bool):
        raise ScoreOutOfRange(f"score must be an integer, got {score!r}")
    if not 0 <= score <= MAX_SCALE_SCORE:
        raise ScoreOutOfRange(f"score {score} outside [0, {MAX_SCALE_SCORE}]")


def severity_level(scale: Scale, score: int) -> SeverityLevel:
    """Look up the severity band a score falls into for one scale."""
    _check_score(score)
    lowers = _BAND_LOWER[scale]
    level = SeverityLevel.NORMAL
    for band, lower in zip(SeverityLevel, lowers):
        if score >= lower:
            level = band
    return level


@dataclass(frozen=True, slots=True)
class DassScores:
    """One participant's three scale totals."""

    depression: int
    anxiety: int
    stress: int

    def __post_init__(self):
        for value in (self.depression, self.anxiety, self.stress):
            _check_score(value)


@dataclass(frozen=True, slots=True)
class EmotionLabels:
    depressed: bool
    anxious: bool
    stressed: bool


def dichotomize(scores: DassScores) -> EmotionLabels:
    """Map scale scores to boolean state labels.

    A state is present exactly when its score leaves the Normal band:
    depression > 9, anxiety > 7, stress > 14.
    """
    return EmotionLabels(
        depressed=scores.depression > DICHOTOMY_THRESHOLD[Scale.DEPRESSION],
        anxious=scores.anxiety > DICHOTOMY_THRESHOLD[Scale.ANXIETY],
        stressed=scores.stress > DICHOTOMY_THRESHOLD[Scale.STRESS],
    )


class LabelPair(Enum):
    """The three pairwise label combinations, (first, second)."""

    ANXIETY_STRESS = ("anxious", "stressed")
    STRESS_DEPRESSION = ("stressed", "depressed")
    ANXIETY_DEPRESSION = ("anxious", "depressed")


@dataclass(frozen=True)
class CrossTable:
    """2x2 co-occurrence counts for one label pair.

    ``counts[i][j]`` counts participants whose first label is bool(i)
    and second label is bool(j); index 0 means absent, 1 means present.
    """

    pair: LabelPair
    counts: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def percentages(self) -> np.ndarray:
        return self.counts * (100.0 / self.n)


def cross_tabulate(labels: list[EmotionLabels], pair: LabelPair) -> CrossTable:
    """Count how often two states occur together, separately, or not at all."""
    if not labels:
        raise EmptyInput("no labels to tabulate")
    first_field, second_field = pair.value
    counts = np.zeros((2, 2), dtype=np.int64)
    for lab in labels:
        i = int(getattr(lab, first_field))
        j = int(getattr(lab, second_field))
        counts[i, j] += 1
    return CrossTable(pair=pair, counts=counts)


def chi_square_2x2(counts) -> tuple[float, float]:
    """Pearson's chi-square test of independence for a 2x2 table.

    For [[a, b], [c, d]] with n = a+b+c+d the statistic is

        n * (a*d - b*c)**2 / ((a+b) * (c+d) * (a+c) * (b+d))

    without continuity correction. The p-value is the chi-square(1 dof)
    survival function, which reduces to erfc(sqrt(x / 2)).

    Raises DegenerateMarginal when a row or column sums to zero.
    """
    table = np.asarray(counts)
    if table.shape != (2, 2):
        raise DegenerateMarginal(f"expected a 2x2 table, got shape {table.shape}")
    a, b = int(table[0, 0]), int(table[0, 1])
    c, d = int(table[1, 0]), int(table[1, 1])
    if min(a, b, c, d) < 0:
        raise DegenerateMarginal("negative cell count")
    n = a + b + c + d
    marginals = (a + b, c + d, a + c, b + d)
    if any(m == 0 for m in marginals):
        raise DegenerateMarginal(f"zero marginal in table {[[a, b], [c, d]]}")
    # exact integer arithmetic until the final division
    statistic = n * (a * d - b * c) ** 2 / math.prod(marginals)
    p_value = math.erfc(math.sqrt(statistic / 2.0))
    return float(statistic), float(p_value)
