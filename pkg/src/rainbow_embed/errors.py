"""Shared exception types."""


class RainbowError(Exception):
    """Base class for errors raised by this package."""


class InvalidEdgeError(RainbowError, ValueError):
    """A loop or out-of-range vertex pair was used as an edge."""


class ParameterError(RainbowError, ValueError):
    """Arguments violate a documented precondition."""


class SizeError(ParameterError):
    """Instance is too large (or too small) for the requested operation."""


class ScanLimitError(SizeError):
    """An exact exhaustive scan was refused because the instance is too big."""


class CompletionError(RainbowError, RuntimeError):
    """A guaranteed greedy completion got stuck; carries the stuck vertex."""

    def __init__(self, vertex, message=None):
        self.vertex = vertex
        super().__init__(message or f"greedy completion stuck at vertex {vertex}")


class EmbedFailure(RainbowError, RuntimeError):
    """All retries of the embedding pipeline failed; carries the trace."""

    def __init__(self, trace, message="embedding failed after all retries"):
        self.trace = trace
        super().__init__(message)
