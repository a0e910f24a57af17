"""Custom exceptions for the rough isometry toolkit."""

from __future__ import annotations


class RoughIsometryError(RuntimeError):
    """Base exception for every domain error raised by the package."""


class EmptyWindowError(RoughIsometryError):
    """Raised when a sampled window leaves one of the point sets empty."""


class ImageNotInCodomainError(RoughIsometryError):
    """Raised when a mapping sends a point outside its codomain."""


class HorizonTooSmallError(RoughIsometryError):
    """Raised when a finite window cannot certify an exact answer."""


class PreconditionViolatedError(RoughIsometryError):
    """Raised when an operation is called outside its stated hypotheses."""


class InsufficientGapsError(RoughIsometryError):
    """Raised when a gap sequence is shorter than the search needs."""


class BudgetExceededError(RoughIsometryError):
    """Raised when an exact search exceeds its configured budget."""


class NotFoundWithinBudgetError(RoughIsometryError):
    """Raised when a search exhausts its budget without a witness."""


class DomainMismatchError(RoughIsometryError):
    """Raised when two mappings do not share domain and codomain."""


class StreamExhaustedError(RoughIsometryError):
    """Raised when a demand-driven stream hits its point budget."""


class LatticeClosureError(RoughIsometryError):
    """Raised when an enumerated family is not closed under join or meet."""
