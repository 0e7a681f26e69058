"""Exceptions shared across modules, mapped to CLI exit codes."""


class PreconditionError(ValueError):
    """Input violates a stated hypothesis (parity, nonzero residual, ...)."""
