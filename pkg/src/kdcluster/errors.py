"""Exception types raised across the toolkit."""


class KdClusterError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(KdClusterError, ValueError):
    """Malformed points: wrong dimension, non-finite coordinates, empty data."""


class InvalidParameterError(KdClusterError, ValueError):
    """A numeric parameter (k, epsilon, bucket size, ...) is out of range."""


class InternalInvariantError(KdClusterError, RuntimeError):
    """An internal precondition was violated; indicates a bug in the caller."""


class PointsParseError(KdClusterError, ValueError):
    """A points file could not be parsed."""

    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")
