"""Exception hierarchy.

``InputError`` subclasses signal bad user input (CLI exit code 2);
``NumericError`` subclasses signal a numerical failure (exit code 1).
"""


class KRError(Exception):
    """Base class for all library errors."""


class InputError(KRError, ValueError):
    pass


class NumericError(KRError, ArithmeticError):
    pass


# measures
class ZeroMass(InputError):
    pass


class SupportMismatch(InputError):
    pass


class MassMismatch(InputError):
    pass


class InvalidTargetIndex(InputError):
    pass


class EmptySample(InputError):
    pass


class DuplicatePoint(InputError):
    pass


# metrics
class DimensionMismatch(InputError):
    pass


class InvalidMetric(InputError):
    pass


class EmptySubset(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class MethodMismatch(InputError):
    pass


# transport
class NonFiniteCost(InputError):
    pass


class Degenerate(InputError):
    pass


class SolverFailure(NumericError):
    pass


# trend
class DegenerateMargin(InputError):
    pass


class EmptyCategory(InputError):
    pass


class ConstantScores(InputError):
    pass


class ZeroVariance(InputError):
    pass


class DegenerateAlpha(InputError):
    pass


# classify
class NegativeEps(InputError):
    pass


class RangeViolation(InputError):
    pass


class InvalidRho(InputError):
    pass


class WExceedsMass(InputError):
    pass


class NotLipschitz(InputError):
    pass


class SingleClass(InputError):
    pass


class ZeroDiameter(InputError):
    pass


# select
class TooLarge(InputError):
    pass


# ingest
class MalformedLine(InputError):
    def __init__(self, line_no: int, msg: str = ""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {msg}" if msg else f"line {line_no}")


class InconsistentWidth(InputError):
    pass


class NegativeProbability(InputError):
    pass


class AllMissing(InputError):
    pass


class MalformedHeader(InputError):
    pass


class BadLabel(InputError):
    def __init__(self, line_no: int, value: str = ""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: bad label {value!r}")
