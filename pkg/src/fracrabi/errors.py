"""Error types shared across the package."""


class FracRabiError(Exception):
    """Base class for all frac-rabi errors."""


class DomainError(FracRabiError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ConvergenceError(FracRabiError, ArithmeticError):
    """A series, quadrature or solver failed to meet its error target."""
