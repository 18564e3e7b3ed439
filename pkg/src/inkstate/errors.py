"""Exception types raised across the package.

Everything derives from InkstateError so callers (and the CLI) can catch
one base class and map it to a nonzero exit code.
"""


class InkstateError(Exception):
    """Base class for all errors raised by this package."""


# --- SVC codec ---------------------------------------------------------

class EmptyInput(InkstateError):
    """No usable content (empty file, empty label list, ...)."""


class MalformedRow(InkstateError):
    """A row could not be parsed: wrong arity, non-integer token, or a
    declared point count that disagrees with the rows present."""


class TimestampViolation(InkstateError):
    """Timestamps must strictly increase within a recording."""


class RangeViolation(InkstateError):
    """A channel value is outside its valid domain."""


# --- scales / labels ---------------------------------------------------

class ScoreOutOfRange(InkstateError):
    """A scale score outside [0, 42]."""


class DegenerateMarginal(InkstateError):
    """A 2x2 table with a zero row or column marginal."""


# --- feature extraction / corpus ---------------------------------------

class MissingTask(InkstateError):
    """A session lacks a feature-bearing task under the strict policy."""


class EmptyCorpus(InkstateError):
    """A corpus with no participants."""


# --- forest ------------------------------------------------------------

class EmptySplit(InkstateError):
    """Impurity requested for an empty sample."""


class SingleClassInput(InkstateError):
    """Training data containing only one class."""


class ShapeMismatch(InkstateError):
    """Matrix/label dimensions disagree."""


class NoOobCoverage(InkstateError):
    """No training row is out-of-bag for any tree."""


class NoOobVotes(InkstateError):
    """The requested row received no out-of-bag votes."""


class InvalidConfig(InkstateError):
    """A configuration value violates its invariants."""


# --- ranking / evaluation / CLI ----------------------------------------

class KTooLarge(InkstateError):
    """Asked for more top-ranked features than exist."""


class TooFewRows(InkstateError):
    """Cross-validation needs at least two rows."""


class IdMismatch(InkstateError):
    """Participant id sets of two input files disagree."""
