"""Exception types shared across the toolkit."""


class DylpError(Exception):
    """Base class for all toolkit-specific errors."""


class StructuralError(DylpError):
    """Input violates a structural contract (time steps, node ids, formats)."""


class EmptyNetworkError(DylpError):
    """No usable events or edges remain after parsing and binning."""


class InsufficientHistoryError(DylpError):
    """The operation needs more time steps than the network provides."""


class UndefinedMetricError(DylpError):
    """The metric is mathematically undefined for this input (e.g. no positives)."""
