"""Shared exception types."""


class DomainError(ValueError):
    """An argument lies outside an operation's stated domain."""


class PrecisionError(ArithmeticError):
    """A request would require materializing numbers beyond the feasible size."""


class UnresolvedComparison(RuntimeError):
    """A comparison could not be settled within the precision budget."""


class ResourceError(RuntimeError):
    """An instance exceeds a hard resource guard (e.g. factorial search size)."""
