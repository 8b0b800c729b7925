"""Exception hierarchy shared by every spheresym module.

Out-of-domain arguments subclass ``ValueError`` so callers that only know
the standard library can still catch them the usual way.
"""

from __future__ import annotations

from typing import Optional


class SpheresymError(Exception):
    """Base class for all errors raised by the toolkit."""


class DomainError(SpheresymError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularityError(DomainError):
    """The operation is singular at the given point (e.g. the north pole)."""


class PreconditionError(DomainError):
    """A documented precondition of the operation does not hold."""


class ResourceError(SpheresymError):
    """The request would exceed a memory or size guard."""


class UnsupportedProblemError(SpheresymError):
    """The problem is well posed but no solution path is implemented for it."""


class ConfigError(SpheresymError, ValueError):
    """A run configuration failed validation."""


class ConvergenceError(SpheresymError):
    """An iterative solver ran out of budget before meeting its tolerance."""

    def __init__(self, message: str, last_residual: float, iterations: Optional[int] = None) -> None:
        super().__init__(f"{message} (residual={last_residual:.3e}, iterations={iterations})")
        self.last_residual = last_residual
        self.iterations = iterations
