"""Shared exception types."""


class GroupError(ValueError):
    """Invalid group-theoretic input: bad generators, parameters out of range."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed its configured size or memory budget."""


class VerificationError(AssertionError):
    """An internal consistency check that should never fail did fail."""
