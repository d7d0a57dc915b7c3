"""Exception types shared across the package."""


class CapacityError(RuntimeError):
    """Instance is larger than a configured size limit."""


class NumericalError(RuntimeError):
    """A propagator or eigensolver failed to reach its target accuracy."""


class GraphParseError(ValueError):
    """Malformed graph text. ``line`` is 1-based, or None for whole-file errors."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
