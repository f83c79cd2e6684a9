"""Exception types shared across the package."""


class LimitSeriesError(Exception):
    """Base class for all package errors."""


class GraphError(LimitSeriesError):
    """Invalid dual graph (loops, disconnected, bad indices)."""


class ReachabilityError(LimitSeriesError):
    """A multidegree is not reachable within the search bound."""


class ModelConsistencyError(LimitSeriesError):
    """A twist map left its target section space; the model is inconsistent."""


class DegenerateInstanceError(LimitSeriesError):
    """Instance violates a standing degree assumption (e.g. divisor sequence too short)."""


class GenerationBudgetError(LimitSeriesError):
    """A randomized generator exhausted its resampling budget."""
