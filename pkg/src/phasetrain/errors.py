"""Exception types raised across the package."""


class PhaseTrainError(Exception):
    """Base class for all package errors."""


class ModelError(PhaseTrainError, ValueError):
    """A model violates one of its invariants."""


class DomainError(PhaseTrainError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class UnsupportedSurface(PhaseTrainError):
    """The model has no entropy surface in this framework."""


class SurfaceEvaluationError(PhaseTrainError, ArithmeticError):
    """An entropy surface returned a non-finite value."""


class NonDifferentiablePoint(PhaseTrainError):
    """Derivative requested exactly at a declared kink.

    Carries the one-sided derivatives so callers can pick a convention.
    """

    def __init__(self, eps, left, right):
        super().__init__(
            f"non-differentiable point at eps={eps!r} "
            f"(left={left!r}, right={right!r})"
        )
        self.eps = eps
        self.left = left
        self.right = right


class QuadratureError(PhaseTrainError, ArithmeticError):
    """Adaptive quadrature did not reach its tolerance."""


class ObjectiveError(PhaseTrainError, ArithmeticError):
    """An optimization objective evaluated to a non-finite value."""


class EnumerationTooLarge(PhaseTrainError):
    """A brute-force enumeration exceeds its budget."""


class InsufficientSamples(PhaseTrainError, ValueError):
    """Supplied per-symbol entropies do not cover the requested window."""


class ConfigError(PhaseTrainError, ValueError):
    """A simulation or coding configuration is invalid."""


class BoundViolation(PhaseTrainError, AssertionError):
    """A bound chain failed one of its ordering checks."""
