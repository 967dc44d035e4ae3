# skipless/errors.py
"""Exception hierarchy shared by every skipless module.

Anything deriving from SkiplessError is a domain failure (CLI exit code 1),
except ParameterOutOfRange which the CLI reports as a usage error (exit 2).
"""


class SkiplessError(Exception):
    """Root of all domain errors."""


class ParameterOutOfRange(SkiplessError, ValueError):
    pass


class DescriptorError(SkiplessError):
    """Malformed or unknown JSON descriptor / data asset."""


# finite field
class SingularMatrix(SkiplessError):
    pass


# zigzag codes
class ShapeMismatch(SkiplessError, ValueError):
    pass


class CoefficientSearchExhausted(SkiplessError):
    pass


class UnsupportedFailure(SkiplessError):
    pass


class EliminationFailed(SkiplessError):
    pass


class TooManySubsets(SkiplessError):
    pass


# steiner designs
class NotAnSQS(SkiplessError):
    pass


class DuplicateBlock(SkiplessError):
    pass


class UnsupportedOrder(SkiplessError):
    pass


class TooManyTriples(SkiplessError):
    pass


class InfinityInBlock(SkiplessError, ValueError):
    pass


class NoZeroSkipPlan(SkiplessError):
    pass


# fr codes
class BlockSizeMismatch(SkiplessError):
    pass


# repair simulator
class EmptyRead(SkiplessError, ValueError):
    pass


class OutOfRange(SkiplessError, ValueError):
    pass
