"""Exception types raised across the package."""


class TBRIError(Exception):
    """Base class for all package errors."""


class InvalidDimensions(TBRIError, ValueError):
    pass


class BasisTooLarge(TBRIError, ValueError):
    pass


class IndexOutOfRange(TBRIError, IndexError):
    pass


class DimensionMismatch(TBRIError, ValueError):
    pass


class DegenerateDenominator(TBRIError, ArithmeticError):
    pass


class ConvergenceFailure(TBRIError, RuntimeError):
    pass


class WindowTooShort(TBRIError, ValueError):
    pass


class NoOscillationsDetected(TBRIError, RuntimeError):
    pass


class QuadratureAccuracyLoss(TBRIError, ArithmeticError):
    pass


class NoIntersection(TBRIError, ValueError):
    pass


class InsufficientRange(TBRIError, ValueError):
    pass


class SaturationDominates(TBRIError, ValueError):
    pass


class ConfigError(TBRIError, ValueError):
    """Malformed experiment configuration; carries the offending line if known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
