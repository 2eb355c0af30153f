class S2PAError(Exception):
    """Base class for all package errors."""


class ValuationError(S2PAError, ValueError):
    """A set function is malformed, not normalized, or not monotone."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ItemIndexError(S2PAError, IndexError):
    pass


class DimensionError(S2PAError, ValueError):
    pass


class BudgetExceeded(S2PAError):
    """An exhaustive enumeration would exceed its configured budget."""


class GridError(S2PAError, ValueError):
    """A bid grid cannot express a bid the computation needs."""


class PreconditionError(S2PAError, ValueError):
    pass
