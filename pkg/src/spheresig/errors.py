"""Exception types shared across the package."""


class FormatError(Exception):
    """Raised when a binary or JSON container is malformed or truncated."""


class DivergenceError(ArithmeticError):
    """Raised when an iterative numerical procedure produces non-finite values."""
