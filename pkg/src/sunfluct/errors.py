"""Exception hierarchy. Exit codes: 2 input, 3 analysis, 4 configuration."""


class SunfluctError(Exception):
    """Base class for all package errors."""

    exit_code = 3


class InputError(SunfluctError):
    """Unreadable or invalid input data."""

    exit_code = 2


class FormatMismatchError(InputError):
    """Input text does not match the expected layout."""


class ConfigError(SunfluctError):
    """Invalid configuration value or config file."""

    exit_code = 4


class ParameterError(SunfluctError):
    """Invalid argument to an analysis operation."""


class AlignmentError(SunfluctError):
    """Series or masks cover mismatched rotation ranges."""


class InsufficientDataError(SunfluctError):
    """Too few usable points for the requested computation."""


class DegenerateSeriesError(SunfluctError):
    """Zero-variance input where variation is required."""


class SegmentationError(SunfluctError):
    """Cycle boundaries could not be located."""


class CoverageError(SunfluctError):
    """A rotation falls outside the span covered by the activity record."""


class ShortSeriesWarning(UserWarning):
    """Series length is below the recommended minimum for the operation."""
