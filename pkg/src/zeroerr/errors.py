"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class BudgetExceeded(RuntimeError):
    """An exhaustive computation would exceed its configured budget."""


class ConstructionError(RuntimeError):
    """A combinatorial construction could not produce a valid object."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
