"""Exception hierarchy shared by the numerical modules and the CLI."""

from __future__ import annotations


class RoughBernoulliError(Exception):
    """Base class for all package errors."""


class InvalidProfileError(RoughBernoulliError, ValueError):
    """Roughness profile is malformed (negative samples, bad table, unknown name)."""


class InvalidEpsilonError(RoughBernoulliError, ValueError):
    """Roughness scale is not the reciprocal of a positive integer."""


class DegenerateDomainError(RoughBernoulliError, ValueError):
    """Rough boundary would reach the origin (eps * max h >= 1)."""


class GeometryError(RoughBernoulliError, ValueError):
    """Curves are invalid or cross each other."""


class MeshError(GeometryError):
    """Annular mesh cannot be built between the given curves."""


class SolverError(RoughBernoulliError, RuntimeError):
    """Linear solver did not reach the requested residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class NoSolutionError(RoughBernoulliError, ValueError):
    """Scalar equation has no admissible root."""


class NonConvergenceError(RoughBernoulliError, RuntimeError):
    """Iteration budget exhausted before meeting the tolerance."""

    def __init__(self, message: str, history: list[float] | None = None):
        super().__init__(message)
        self.history = list(history or [])
