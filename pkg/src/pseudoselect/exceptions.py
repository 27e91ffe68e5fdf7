"""Exception hierarchy shared across the package.

Everything derives from :class:`PseudoSelectError` so callers can catch
library failures with a single except clause while still distinguishing
the numerically meaningful cases (divergence, degenerate information
matrices) from plain usage errors.
"""

from __future__ import annotations


class PseudoSelectError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(PseudoSelectError):
    """Operands have incompatible shapes."""


class NotPositiveDefiniteError(PseudoSelectError):
    """A matrix expected to be positive definite has a pivot at or below
    the tolerance. Typically signals a degenerate information matrix,
    e.g. separable data fitted with zero prior precision."""


class DivergedError(PseudoSelectError):
    """The maximum-likelihood fit did not converge; with zero prior
    precision this usually means the data are separable and no finite
    maximizer exists. Refitting with positive prior precision fixes it."""


class EmptyPoolError(PseudoSelectError):
    """A selection step was asked to pick from an empty candidate list."""


class InvalidSpecError(PseudoSelectError):
    """A criterion, objective, or experiment specification is malformed."""


class SizeOverflowError(PseudoSelectError):
    """Requested split sizes exceed the number of available rows."""


class CsvFormatError(PseudoSelectError):
    """A CSV cell could not be parsed; carries row/column location."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class MissingValueError(CsvFormatError):
    """A CSV cell is empty where a value is required."""


class UnknownColumnError(PseudoSelectError):
    """The requested CSV column does not exist."""


class SelectionAbortedError(PseudoSelectError):
    """The pseudo-labeling loop failed mid-run. Carries the iteration,
    the offending pool index, and the partial trace accumulated so far;
    the underlying cause is chained as ``__cause__``."""

    def __init__(self, message: str, iteration: int, pool_index: int | None, trace=None):
        super().__init__(message)
        self.iteration = iteration
        self.pool_index = pool_index
        self.trace = trace


class ScoringError(PseudoSelectError):
    """Candidate scoring failed; tagged with the offending pool index."""

    def __init__(self, message: str, pool_index: int):
        super().__init__(message)
        self.pool_index = pool_index


class NoSuccessfulRunsError(PseudoSelectError):
    """Summary requested but every benchmark run failed."""


class ConfigError(PseudoSelectError):
    """An experiment config file is invalid."""
