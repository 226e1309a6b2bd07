"""Exception hierarchy shared across the package.

Everything raised on purpose derives from :class:`MarkovOddsError` so callers
can catch library failures in one clause.  Validation problems double as
``ValueError`` to stay friendly to generic code.
"""

__all__ = [
    "MarkovOddsError",
    "ValidationError",
    "FormatError",
    "PositivityError",
    "GuardError",
    "ConsistencyError",
]


class MarkovOddsError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(MarkovOddsError, ValueError):
    """Bad arguments: dimension mismatch, index out of range, overlap, ..."""


class FormatError(MarkovOddsError, ValueError):
    """A file (JSON table, graph, model, CSV dataset) failed to parse."""


class PositivityError(MarkovOddsError, ValueError):
    """An operation requiring strictly positive probabilities met a zero."""


class GuardError(MarkovOddsError, RuntimeError):
    """A combinatorial size guard was exceeded; the call was refused."""


class ConsistencyError(MarkovOddsError, RuntimeError):
    """An internal cross-check failed; results would not be trustworthy."""
