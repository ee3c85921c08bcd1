"""Exception types shared across the package."""


class UwbError(Exception):
    """Base class for all package errors."""


class InvalidArgument(UwbError, ValueError):
    pass


class NoSignalError(UwbError):
    """Raised when a B-scan holds no non-zero sample."""


class DegenerateHistogramError(UwbError):
    """Raised by Otsu thresholding when the image has a single gray level."""


class NoStripError(UwbError):
    """Raised when no strip is available to act as the reference."""


class EmptyEdgeError(UwbError):
    """Raised when no strip pixel reaches the edge level."""


class UndefinedErrorPct(UwbError):
    """Raised when a percent error is requested against a zero actual displacement."""


class ParseError(UwbError):
    """Malformed input file. ``line`` is 1-based, or None when not line-specific."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
