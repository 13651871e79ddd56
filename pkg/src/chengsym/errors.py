"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class ChengError(Exception):
    """Base class for all toolkit errors."""


class EvalDomainError(ChengError):
    """Numeric evaluation hit a singular operation (division by zero, log of
    a non-positive value, overflow).  Carries the offending subtree."""

    def __init__(self, message, subtree=None):
        super().__init__(message)
        self.subtree = subtree


class SymbolicDomainError(ChengError):
    """Construction produced an undefined value (e.g. 0 raised to a negative
    power) at the symbolic level."""


class IndeterminateZeroError(ChengError):
    """Probabilistic zero test could not find a single nonsingular sample."""


class UnsupportedOrderError(ChengError):
    """Prolongation requested beyond the supported jet order."""


class ManifoldRestrictionError(ChengError):
    """A system could not be solved for a leading-derivative set."""

    def __init__(self, message, unsolved=()):
        super().__init__(message)
        self.unsolved = tuple(unsolved)


class DegenerateReductionError(ChengError):
    """A similarity reduction was requested outside its validity domain."""


class ReductionFailureError(ChengError):
    """A coordinate chart failed to eliminate the original variables."""

    def __init__(self, message, leftover=()):
        super().__init__(message)
        self.leftover = tuple(leftover)


class ChartSingularError(ChengError):
    """Chart Jacobian vanishes identically on the sampling domain."""


class ClassificationError(ChengError):
    """A reduced equation did not match any known structural pattern."""


class QuadratureDomainError(ChengError):
    """An integrand for a quadrature-defined function vanished or blew up."""


class IntegrationFailureError(ChengError):
    """Numerical integration stopped before reaching the end of the span.

    The partial trajectory (whatever was integrated successfully) is
    attached when available.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class ConvergenceError(ChengError):
    """An iterative scheme failed to converge within its iteration budget."""


class EmptyReportError(ChengError):
    """All grid points were masked; no statistics can be reported."""
