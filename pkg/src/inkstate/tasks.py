"""The seven recorded writing/drawing tasks."""

from enum import IntEnum


class TaskId(IntEnum):
    PENTAGONS = 1
    HOUSE = 2
    HANDPRINT = 3
    LOOPS_LEFT = 4
    LOOPS_RIGHT = 5
    CLOCK = 6
    CURSIVE = 7


#: Tasks that contribute feature columns. The two loop tasks are excluded:
#: they are drawn in a single pen-down movement, so their in-air/stroke
#: measurements carry no information.
FEATURE_TASKS = (
    TaskId.PENTAGONS,
    TaskId.HOUSE,
    TaskId.HANDPRINT,
    TaskId.CLOCK,
    TaskId.CURSIVE,
)

LOOP_TASKS = (TaskId.LOOPS_LEFT, TaskId.LOOPS_RIGHT)

TASK_LABELS = {
    TaskId.PENTAGONS: "pentagons",
    TaskId.HOUSE: "house",
    TaskId.HANDPRINT: "handprint",
    TaskId.LOOPS_LEFT: "loops_left",
    TaskId.LOOPS_RIGHT: "loops_right",
    TaskId.CLOCK: "clock",
    TaskId.CURSIVE: "cursive",
}

LABEL_TO_TASK = {v: k for k, v in TASK_LABELS.items()}


def task_filename(task: TaskId) -> str:
    """On-disk name of a task recording inside a participant directory."""
    return f"task{task.value}.svc"
