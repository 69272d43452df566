"""Exception hierarchy.

Every validation failure raised by the library derives from
:class:`CalibrationError`, itself a :class:`ValueError`, so callers that only
care about "bad input" can catch one type. I/O failures derive from
:class:`OSError` instead, which lets the CLI map them to a separate exit code.
"""


class CalibrationError(ValueError):
    """Base class for input validation errors."""


class InvalidLabel(CalibrationError):
    pass


class MixedLabelConvention(CalibrationError):
    pass


class EmptyDataset(CalibrationError):
    pass


class ScoreOutOfRange(CalibrationError):
    pass


class LengthMismatch(CalibrationError):
    pass


class EmptyInput(CalibrationError):
    pass


class InvalidDistribution(CalibrationError):
    pass


class FitDatasetMismatch(CalibrationError):
    pass


class EmptyGrid(CalibrationError):
    pass


class InvalidCosts(CalibrationError):
    pass


class PreLossZero(CalibrationError):
    """Pre-calibration loss is zero while post-calibration loss is not."""


class RankDeficient(CalibrationError):
    pass


class DimensionMismatch(CalibrationError):
    pass


class InvalidDelta(CalibrationError):
    pass


class InvalidArguments(CalibrationError):
    pass


class InvalidConfig(CalibrationError):
    pass


class EmptyCorpus(CalibrationError):
    pass


class EmptyTrainingSet(CalibrationError):
    pass


class ConstantScores(CalibrationError):
    pass


class ParseError(CalibrationError):
    """A text input row failed validation; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IoFailure(OSError):
    pass
