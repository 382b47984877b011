"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`StlfError`.
The CLI maps the four families below onto its exit codes.
"""

from __future__ import annotations


class StlfError(Exception):
    """Base class for all package errors."""


class DataError(StlfError):
    """Invalid or insufficient input data."""


class ConfigError(StlfError):
    """Invalid configuration or arguments."""


class TrainingError(StlfError):
    """A model could not be trained."""


class PersistenceError(StlfError):
    """A persisted artifact could not be read or written."""


# -- data ---------------------------------------------------------------------


class GapInSeriesError(DataError):
    def __init__(self, missing_hour, message: str | None = None):
        self.missing_hour = missing_hour
        super().__init__(message or f"gap in series: missing hour {missing_hour}")


class NegativeLoadError(DataError):
    pass


class HumidityRangeError(DataError):
    pass


class InvalidRecordError(DataError):
    pass


class DatasetTooShortError(DataError):
    pass


class MalformedRowError(DataError):
    def __init__(self, line: int, reason: str):
        self.line = line
        super().__init__(f"malformed row at line {line}: {reason}")


class SchemaMismatchError(DataError):
    pass


class DegenerateRangeError(DataError):
    pass


class InsufficientHistoryError(DataError):
    pass


class InsufficientFutureError(DataError):
    pass


class LayoutMismatchError(DataError):
    pass


class OverlappingRangesError(DataError):
    pass


class MismatchedEvaluationSetsError(DataError):
    pass


class EmptyInputError(DataError):
    pass


class ZeroActualError(DataError):
    pass


class ZeroPredictedError(DataError):
    pass


class OutOfRangeError(DataError):
    pass


# -- fuzzy --------------------------------------------------------------------


class NoRuleFiredError(StlfError):
    pass


class AllRulesZeroError(StlfError):
    pass


class RuleSyntaxError(StlfError):
    def __init__(self, line: int, reason: str):
        self.line = line
        super().__init__(f"rule syntax error at line {line}: {reason}")


# -- training -----------------------------------------------------------------


class DivergenceError(TrainingError):
    def __init__(self, epoch: int):
        self.epoch = epoch
        super().__init__(f"training diverged at epoch {epoch} (non-finite MSE)")


class InsufficientSamplesError(TrainingError):
    pass


class CapacityExceededError(TrainingError):
    pass


class NonBipolarInputError(TrainingError):
    pass


class MaxIterationsError(StlfError):
    pass


class EnergyIncreaseError(StlfError):
    pass
