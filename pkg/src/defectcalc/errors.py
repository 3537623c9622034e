"""Exception hierarchy shared by every module of the package."""


class DefectCalcError(Exception):
    """Base class for all errors raised by defectcalc."""


class InputError(DefectCalcError, ValueError):
    """Malformed or inconsistent input (shapes, arities, schema)."""


class DimensionMismatch(InputError):
    pass


class ArityMismatch(InputError):
    pass


class ZeroScalar(InputError):
    pass


class OrderTooLarge(InputError):
    pass


class OrderOutOfRange(InputError):
    pass


class UnknownSuite(InputError):
    pass


class ParseError(InputError):
    """Malformed JSON.  ``path`` names the offending location."""

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class SchemaError(InputError):
    """Well-formed JSON that violates the document invariants."""

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class NumericalError(DefectCalcError, ArithmeticError):
    """A computation could not be completed or certified at the given tolerance."""


class Singular(NumericalError):
    pass


class NotInvertible(NumericalError):
    pass


class NotCommuting(NumericalError):
    pass


class NotCrossCommuting(NumericalError):
    pass


class ToleranceAnomaly(NumericalError):
    """A defect vanished at some order and reappeared at a higher one."""


class EnumerationBudgetExceeded(NumericalError):
    pass


class PreconditionFailed(NumericalError):
    pass


class DegreeBudgetExceeded(NumericalError):
    pass


class NotARepeatedRoot(NumericalError):
    pass


class NotStrictTensor(NumericalError):
    pass


class CertificationFailed(NumericalError):
    def __init__(self, message, residual1=None, residual2=None):
        super().__init__(message)
        self.residual1 = residual1
        self.residual2 = residual2
