"""Exception hierarchy for topodrift."""


class TopodriftError(Exception):
    """Base class for all package errors."""


class InputError(TopodriftError, ValueError):
    """Invalid caller-supplied data (bad shapes, non-finite values, ...)."""


class DimensionMismatchError(InputError):
    """Two objects that must share a dimension do not."""


class SimplexBudgetError(TopodriftError):
    """Rips construction would exceed the configured simplex budget."""

    def __init__(self, message, n_points=None, dim=None, budget=None):
        super().__init__(message)
        self.n_points = n_points
        self.dim = dim
        self.budget = budget


class DegenerateStatisticError(TopodriftError):
    """A self-normalizer vanished everywhere; the statistic is undefined."""


class DegeneratePathError(TopodriftError):
    """A simulated path is degenerate (all zeros) and yields no draw."""


class CacheVersionError(TopodriftError):
    """A cached file was written under an incompatible format version."""


class SchemaError(TopodriftError):
    """A serialized file does not match the expected schema."""
