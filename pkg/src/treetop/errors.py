"""Exception hierarchy shared by every treetop module."""

from __future__ import annotations


class TreetopError(Exception):
    """Base class for all library errors."""


class ParseError(TreetopError, ValueError):
    """Malformed matrix text. ``line`` is the 1-based physical line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(TreetopError, ValueError):
    """Input outside the domain of an operation (bad shape, empty matrix, ...)."""


class NotApplicable(DomainError):
    """Raised when an operation needs M > m but the row sums are constant."""


class ConvergenceError(TreetopError, RuntimeError):
    def __init__(self, message: str, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual={residual:.3e} after {iterations} iterations)")


class BudgetExceeded(TreetopError):
    """Brute-force enumeration refused because the candidate space is too large."""


class CertificationUnavailable(TreetopError):
    """A certified lower bound cannot be issued at the requested depth."""
