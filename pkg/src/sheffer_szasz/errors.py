"""Exception hierarchy; the CLI maps each class onto an exit code."""


class ShefferError(Exception):
    """Base class for all package errors."""


class ConfigError(ShefferError, ValueError):
    """Malformed input: bad family document, bad expression, bad option."""


class FamilyValidationError(ShefferError):
    """A family fails the operator restrictions (positivity, H-derivatives, A(1,1))."""


class NumericRangeError(ShefferError, ArithmeticError):
    """Overflow, or a truncated sum that did not converge before its cap."""


class EnvelopeError(NumericRangeError):
    """f violated the user-supplied growth envelope at a sampled abscissa."""
