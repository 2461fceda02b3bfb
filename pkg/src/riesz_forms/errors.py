"""Exception hierarchy shared by the exact and numeric layers."""


class RieszFormsError(Exception):
    """Base class for all toolkit errors."""


class UsageError(RieszFormsError, ValueError):
    """Invalid argument: axis out of range, mismatched degrees, bad config."""


class PoleError(RieszFormsError, ArithmeticError):
    """Evaluation requested at a pole."""


class UnsupportedPoleError(PoleError):
    """Residue requested at a pole of order two or more."""


class UnsupportedError(RieszFormsError):
    """Input lies outside the class an operation is defined on."""


class NotDifferentialOperatorError(UnsupportedError):
    """A multiplier that is not polynomial in the frequency variable was
    asked to act as a differential operator."""


class HypothesisViolation(RieszFormsError):
    """A theorem's hypothesis fails; ``residual`` carries the exact defect."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NumericError(RieszFormsError, FloatingPointError):
    """NaN or overflow in a floating-point route."""
