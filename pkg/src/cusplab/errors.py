"""Exception hierarchy shared by all cusplab modules.

The command-line front end maps these onto process exit codes:
validation errors -> 1, hypothesis errors -> 2, numeric errors -> 3,
I/O errors (plain ``OSError``) -> 4.
"""

from __future__ import annotations


class CusplabError(Exception):
    """Base class for all cusplab-specific errors."""


class ValidationError(CusplabError):
    """Invalid argument, domain violation, or malformed configuration."""


class HypothesisError(CusplabError):
    """A model assumption required by an operation does not hold.

    Example: the Darling-Kac experiment requires a barely-infinite right
    cusp (``p1 == 1``); calling it with any other exponent raises this.
    """


class NumericError(CusplabError):
    """Root-finder non-convergence, overflow, or loss of precision."""


class InsufficientDataError(ValidationError):
    """Not enough recorded observations to evaluate an estimator."""
