"""Exception types shared across the package."""


class SensakitError(Exception):
    """Base class for all package-specific errors."""


class DataError(SensakitError):
    """Malformed tabular input (ragged rows, non-numeric cells, bad roles)."""


class DegenerateColumnError(DataError):
    """A column has zero variance where a spread is required."""


class DegenerateOutputError(SensakitError):
    """The output column is constant, so SS_tot vanishes."""


class UnsupportedDesignError(SensakitError):
    """A design (e.g. Latin hypercube) was requested for a law it cannot serve."""


class BudgetExceededError(SensakitError):
    """A tensor grid would exceed the allowed number of model evaluations."""


class IllConditionedFitError(SensakitError):
    """Kernel matrix factorization failed even after jitter escalation."""
