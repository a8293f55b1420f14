"""Exception hierarchy shared by all modules."""


class LTError(Exception):
    """Base class for errors raised by this package."""


class SpecMismatch(LTError, ValueError):
    pass


class NotDivisible(LTError, ArithmeticError):
    pass


class PrecisionExhausted(LTError, ArithmeticError):
    pass


class DivisionByZero(LTError, ZeroDivisionError):
    pass


class NoEmbedding(LTError, ValueError):
    pass


class SingularMatrix(LTError, ValueError):
    pass


class FieldMismatch(LTError, ValueError):
    pass


class NotAUnit(LTError, ArithmeticError):
    pass


class CompositionDiverges(LTError, ArithmeticError):
    pass


class NotAOneUnit(LTError, ArithmeticError):
    pass


class DenominatorDivisibleByP(LTError, ValueError):
    pass


class OutOfRange(LTError, ValueError):
    pass


class DimensionMismatch(LTError, ValueError):
    pass


class TooLarge(LTError, ValueError):
    pass


class NotPrimitive(LTError, ValueError):
    pass


class ZeroLambda(LTError, ValueError):
    pass


class NotInvertible(LTError, ArithmeticError):
    pass


class IncompatiblePair(LTError, ValueError):
    pass


class ShapeMismatch(LTError, ValueError):
    pass


class SearchFailed(LTError, RuntimeError):
    pass
