"""Exception types shared across the package."""


class RefAgreeError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(RefAgreeError):
    """Input data violates the schema or a domain invariant (CLI exit code 2)."""


class ComputationError(RefAgreeError):
    """A computation is undefined or degenerate on the given data (CLI exit code 3)."""
