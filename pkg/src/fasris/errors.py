"""Exception types shared across the package."""


class FasrisError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FasrisError, ValueError):
    """Argument outside a function's mathematical domain."""


class ValidationError(FasrisError, ValueError):
    """Structurally invalid configuration or input."""


class NumericError(FasrisError, ArithmeticError):
    """A numeric procedure failed to meet its accuracy contract."""
