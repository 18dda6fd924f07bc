"""
Exception hierarchy for the UGAT library.

Library code raises these; only the CLI turns them into exit codes.
"""

from typing import Any, Optional


class UGATError(Exception):
    """Base class for every error raised by this package"""


class DomainError(UGATError, ValueError):
    """A parameter lies outside the domain of the distribution"""


class DivergentParameters(DomainError):
    """The normalizing series diverges for the requested parameters"""


class NonConvergent(UGATError, ArithmeticError):
    """A certified series could not reach its tolerance within the term cap"""


class IndexOutOfRange(UGATError, IndexError):
    """Coordinate index outside 1..r"""


class DimensionMismatch(UGATError, ValueError):
    """Input dimension does not match the distribution dimension"""


class BoxTooLarge(UGATError, ValueError):
    """Exact box summation would exceed the configured cell cap"""


class OutOfTabulatedRange(UGATError, ValueError):
    """Request outside the tabulated range of a combinatorial table"""


class ZeroProbabilityCondition(UGATError, ValueError):
    """Conditioning event has probability zero"""


class DegenerateData(UGATError, ValueError):
    """Dataset cannot identify the model (e.g. an all-zero coordinate)"""


class SingularInformation(UGATError, ArithmeticError):
    """Observed information matrix is singular or not positive definite"""


class GridTooLarge(UGATError, ValueError):
    """Reliability grid exceeds the configured cap"""


class UsageError(UGATError):
    """Bad command-line usage"""


class MalformedTable(UGATError, ValueError):
    """CSV count table failed validation"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DidNotConverge(UGATError):
    """Optimizer stopped without meeting the convergence criterion"""

    def __init__(self, message: str, result: Any = None):
        super().__init__(message)
        self.result = result


class InvalidDocument(UGATError):
    """Output document is missing keys required by the shipped schema"""
