"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`HlocError`,
which is also a :class:`ValueError` so callers that only care about bad input
can catch that instead.
"""


class HlocError(ValueError):
    """Base class for all package errors."""


class InvalidScaleError(HlocError):
    """Box size outside ``[2, N]`` or an inconsistent tau grid."""


class InvalidDataError(HlocError):
    """Non-finite or otherwise unusable numeric input."""


class InvalidParameterError(HlocError):
    """A configuration value outside its allowed domain."""


class DegenerateWindowError(HlocError):
    """Window has no fluctuation left after detrending (constant or linear)."""


class InsufficientScalesError(HlocError):
    """Fewer than four box sizes inside the scaling range."""


class InsufficientDataError(HlocError):
    """Series too short for the requested operation."""


class InsufficientHistoryError(HlocError):
    """Moving averages or lookback windows are not yet defined."""


class DegenerateRegressionError(HlocError):
    """Regression abscissae carry no spread."""


class NoCrossingError(HlocError):
    """A fitted trend never reaches the requested level."""


class GenerationError(HlocError):
    """Synthetic series could not be generated."""


class InvalidProfileError(HlocError):
    """Crash drop schedule would produce non-positive prices."""


class ParseError(HlocError):
    """Malformed input file."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(ParseError):
    """Well-formed but semantically invalid record (e.g. non-positive close)."""


class EmptyInputError(ParseError):
    """Input file contains no data rows."""
