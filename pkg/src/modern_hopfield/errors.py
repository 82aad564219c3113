class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class InfeasibleError(DomainError):
    """A capacity formula has no real solution for the given parameters."""
