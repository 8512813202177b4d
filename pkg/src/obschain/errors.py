"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class UnsupportedEncodingError(DomainError):
    """The requested encoding is not defined for the given parameters."""


class NumericError(RuntimeError):
    """A numerical procedure failed to converge or stalled."""
