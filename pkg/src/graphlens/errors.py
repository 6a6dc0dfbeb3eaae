"""Typed errors shared across the package."""


class GraphlensError(ValueError):
    """Base class for all validation errors raised by this package."""


class GraphStructureError(GraphlensError):
    """Malformed graph or pattern (bad endpoint, self-loop, disconnected pattern)."""


class DimensionError(GraphlensError):
    """Feature or weight dimensions do not chain."""


class LabelMismatchError(GraphlensError):
    """A graph handed to the explainer is not classified with the requested label."""


class StreamOrderError(GraphlensError):
    """A streamed node is a duplicate or references an unseen endpoint."""


class DatasetFormatError(GraphlensError):
    """A dataset file could not be parsed; message carries file and line."""


class CoverError(GraphlensError):
    """Set-cover selection could not cover the universe (defensive; singletons
    make full coverage always achievable)."""
