"""Exception hierarchy shared by the library and the CLI."""


class SparseStressError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 5


class GraphParseError(SparseStressError, ValueError):
    exit_code = 3

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphValidationError(GraphParseError):
    pass


class UnsupportedFormatError(GraphParseError):
    pass


class ConfigError(SparseStressError, ValueError):
    exit_code = 4


class SizeError(ConfigError):
    pass


class DisconnectedGraphError(SparseStressError):
    pass


class DegenerateLayoutError(SparseStressError, ValueError):
    pass


class DegenerateDistanceError(SparseStressError, ValueError):
    pass
