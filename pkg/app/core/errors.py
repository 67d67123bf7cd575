"""Exception hierarchy for the sizing toolkit.

Value-type failures subclass ``ValueError`` so callers that already catch
``ValueError`` (as the HTTP layer does) keep working.
"""

from typing import Optional


class RessizeError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(RessizeError, ValueError):
    """A scenario or option failed validation.

    Attributes:
        path: JSON-pointer style location of the offending field
        reason: Short human-readable reason
    """

    def __init__(self, path: str, reason: str):
        self.path = path or "/"
        self.reason = reason
        super().__init__(f"{self.path}: {reason}")


class DomainError(RessizeError, ValueError):
    """An argument lies outside the domain of a formula."""


class DimensionError(RessizeError, ValueError):
    """A vector does not have the expected length."""


class ConsistencyError(RessizeError):
    """Recomputed quantities disagree with the solver's answer."""


class UnboundedDomainError(RessizeError, ValueError):
    """A free variable appears in no row and no objective term."""


class SolverError(RessizeError):
    """Base class for solver failures that are not infeasible/unbounded outcomes."""


class IterationLimitError(SolverError):
    """The simplex iteration budget ran out.

    Attributes:
        solution: Best iterate reached before stopping
    """

    def __init__(self, message: str, solution=None):
        super().__init__(message)
        self.solution = solution


class NumericalBreakdownError(SolverError):
    """The basis stayed singular after refactorization."""


class ParseError(RessizeError, ValueError):
    """A data file could not be parsed.

    Attributes:
        line: 1-based line number in the file (header is line 1), if known
    """

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GapError(ParseError):
    """Timestamps are not strictly increasing with a uniform step."""


class RangeError(RessizeError, ValueError):
    """Values fall outside the range allowed by their unit."""


class GridMismatchError(RessizeError, ValueError):
    """Two sweep reports do not share the same alpha grid."""


class WeightError(RessizeError, ValueError):
    """Bus allocation weights do not sum to one."""


class IoError(RessizeError, OSError):
    """Results could not be written."""


class NetworkError(RessizeError):
    """The resource service could not be reached."""


class AuthError(NetworkError):
    """The resource service rejected the token."""


class QuotaError(NetworkError):
    """The resource service rate limit was hit."""
