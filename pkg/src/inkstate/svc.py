"""Reader/writer for the SVC tablet recording format.

An SVC file is plain ASCII text. An optional first line holds the point
count; every following line is one sample of seven whitespace-separated
integers:

    x y timestamp pen_status azimuth altitude pressure

with pen_status 0 (in air) or 1 (on paper), azimuth in [0, 4095] raw
tablet units, altitude in [0, 1023], pressure >= 0, and timestamps in
milliseconds, strictly increasing down the file. Output is always
LF-terminated, single-space separated, count header first, so that
parse(serialize(r)) == r.

Parsing never lets arbitrary bytes escape as anything other than a
subclass of InkstateError.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .errors import EmptyInput, MalformedRow, RangeViolation, TimestampViolation
from .tasks import TaskId

AZIMUTH_MAX = 4095
ALTITUDE_MAX = 1023

PARSE_MODES = ("strict", "lenient")


class PenStatus(IntEnum):
    IN_AIR = 0
    ON_PAPER = 1


@dataclass(frozen=True, slots=True)
class SamplePoint:
    """One tablet sample: the seven recorded channels."""

    x: int
    y: int
    timestamp: int
    pen_status: PenStatus
    azimuth: int
    altitude: int
    pressure: int


@dataclass(frozen=True, slots=True)
class TaskRecording:
    """An ordered sample sequence for one task of one participant.

    ``declared_count`` is the optional count-header value found while
    parsing (always written on output). Lenient-mode parse issues are
    carried in ``warnings``.
    """

    points: tuple[SamplePoint, ...]
    task: TaskId | None = None
    declared_count: int | None = None
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class Stroke:
    """A maximal run of samples sharing one pen status.

    ``start``/``end`` index into the recording's points, both inclusive.
    """

    kind: PenStatus
    start: int
    end: int

    @property
    def n_points(self) -> int:
        return self.end - self.start + 1


def _check_mode(mode: str) -> None:
    if mode not in PARSE_MODES:
        raise ValueError(f"mode must be one of {PARSE_MODES}, got {mode!r}")


def parse_svc(
    data: bytes | str,
    mode: str = "strict",
    task: TaskId | None = None,
) -> TaskRecording:
    """Parse SVC text into a TaskRecording.

    In strict mode every irregularity is an error. In lenient mode a
    count mismatch, a pen-down sample with zero pressure, an in-air
    sample with nonzero pressure, and a duplicated timestamp (the later
    sample is dropped) are downgraded to warnings on the result.

    Raises EmptyInput, MalformedRow, TimestampViolation or
    RangeViolation.
    """
    _check_mode(mode)
    lenient = mode == "lenient"
    if isinstance(data, bytes):
        # latin-1 cannot fail; garbage bytes surface later as MalformedRow
        text = data.decode("latin-1")
    else:
        text = data

    warnings: list[str] = []
    points: list[SamplePoint] = []
    declared_count: int | None = None
    prev_t: int | None = None
    first_content = True

    for lineno, raw in enumerate(text.split("\n"), start=1):
        tokens = raw.split()
        if not tokens:
            continue
        if first_content and len(tokens) == 1:
            first_content = False
            try:
                declared_count = int(tokens[0])
            except ValueError:
                raise MalformedRow(
                    f"line {lineno}: expected integer count header, got {tokens[0]!r}"
                ) from None
            if declared_count < 0:
                raise MalformedRow(f"line {lineno}: negative count header")
            continue
        first_content = False
        if len(tokens) != 7:
            raise MalformedRow(
                f"line {lineno}: expected 7 columns, got {len(tokens)}"
            )
        try:
            x, y, t, status, azimuth, altitude, pressure = (int(v) for v in tokens)
        except ValueError:
            raise MalformedRow(f"line {lineno}: non-integer value") from None

        if status not in (0, 1):
            raise RangeViolation(f"line {lineno}: pen status {status} not in {{0, 1}}")
        if not 0 <= azimuth <= AZIMUTH_MAX:
            raise RangeViolation(
                f"line {lineno}: azimuth {azimuth} outside [0, {AZIMUTH_MAX}]"
            )
        if not 0 <= altitude <= ALTITUDE_MAX:
            raise RangeViolation(
                f"line {lineno}: altitude {altitude} outside [0, {ALTITUDE_MAX}]"
            )
        if pressure < 0:
            raise RangeViolation(f"line {lineno}: negative pressure {pressure}")

        if prev_t is not None:
            if t < prev_t:
                raise TimestampViolation(
                    f"line {lineno}: timestamp {t} decreases (previous {prev_t})"
                )
            if t == prev_t:
                if lenient:
                    warnings.append(f"line {lineno}: duplicate timestamp {t}, sample dropped")
                    continue
                raise TimestampViolation(f"line {lineno}: duplicate timestamp {t}")
        prev_t = t

        if status == 1 and pressure == 0:
            # plausible touch-down transition sample
            msg = f"line {lineno}: pen-down sample with zero pressure"
            if lenient:
                warnings.append(msg)
            else:
                raise RangeViolation(msg)
        if status == 0 and pressure > 0:
            msg = f"line {lineno}: in-air sample with pressure {pressure}"
            if lenient:
                warnings.append(msg)
            else:
                raise RangeViolation(msg)

        points.append(
            SamplePoint(x, y, t, PenStatus(status), azimuth, altitude, pressure)
        )

    if first_content:
        raise EmptyInput("no content lines")
    if not points:
        if declared_count == 0 and lenient:
            pass  # "0" header with no rows is tolerated when lenient
        elif declared_count not in (None, 0):
            raise MalformedRow(
                f"declared count {declared_count} but parsed 0 samples"
            )
        else:
            raise EmptyInput("recording contains no samples")
    if declared_count is not None and declared_count != len(points):
        msg = f"declared count {declared_count} but parsed {len(points)} samples"
        if lenient:
            warnings.append(msg)
        else:
            raise MalformedRow(msg)

    return TaskRecording(
        points=tuple(points),
        task=task,
        declared_count=declared_count,
        warnings=tuple(warnings),
    )


def serialize_svc(recording: TaskRecording) -> bytes:
    """Emit a recording as SVC bytes: count header, then one row per point."""
    lines = [str(len(recording.points))]
    for p in recording.points:
        lines.append(
            f"{p.x} {p.y} {p.timestamp} {int(p.pen_status)} "
            f"{p.azimuth} {p.altitude} {p.pressure}"
        )
    return ("\n".join(lines) + "\n").encode("ascii")


def normalize_angles(azimuth_raw: int, altitude_raw: int) -> tuple[float, float]:
    """Convert raw pen angles to degrees.

    Azimuth full scale (4095) maps to 360 degrees, altitude full scale
    (1023) to 90 degrees. Values are returned unrounded.
    """
    if not 0 <= azimuth_raw <= AZIMUTH_MAX:
        raise RangeViolation(f"azimuth {azimuth_raw} outside [0, {AZIMUTH_MAX}]")
    if not 0 <= altitude_raw <= ALTITUDE_MAX:
        raise RangeViolation(f"altitude {altitude_raw} outside [0, {ALTITUDE_MAX}]")
    return azimuth_raw * 360.0 / AZIMUTH_MAX, altitude_raw * 90.0 / ALTITUDE_MAX


def segment_strokes(recording: TaskRecording) -> list[Stroke]:
    """Split a recording into maximal constant-pen-status runs, in order.

    The runs cover every point exactly once; adjacent runs alternate in
    kind. An empty recording yields an empty list.
    """
    points = recording.points
    if not points:
        return []
    strokes: list[Stroke] = []
    start = 0
    kind = points[0].pen_status
    for i in range(1, len(points)):
        if points[i].pen_status != kind:
            strokes.append(Stroke(kind, start, i - 1))
            start = i
            kind = points[i].pen_status
    strokes.append(Stroke(kind, start, len(points) - 1))
    return strokes
