"""Exception types raised across the library.

The hierarchy is intentionally shallow: callers that only want "this input
was bad" can catch ShapeTensorError; the subclasses exist so tests and the
CLI can map failures to distinct exit codes and messages.
"""


class ShapeTensorError(Exception):
    """Base class for all library-specific failures."""


class ContractError(ShapeTensorError, ValueError):
    """An argument violated a documented precondition or type invariant
    (non-orthonormal representative, non-horizontal tangent, non-SPD
    matrix, malformed configuration, ...)."""


class DegenerateGeometryError(ShapeTensorError, ValueError):
    """The geometry itself is degenerate: rank-deficient landmarks,
    zero-length segments, singular scale matrices, zero-variance
    ensembles."""


class NormalNeighborhoodError(ShapeTensorError, ValueError):
    """A logarithm was requested between points too far apart: the
    target lies outside the normal neighborhood of the base point."""


class ConvergenceError(ShapeTensorError, RuntimeError):
    """An iterative routine exhausted its iteration budget.

    Carries ``gradient_norm``, the norm of the final update direction,
    so callers can judge how close the iteration got.
    """

    def __init__(self, message, gradient_norm=None):
        super().__init__(message)
        self.gradient_norm = gradient_norm


class ExtrapolationError(ShapeTensorError, ValueError):
    """A spanwise evaluation was requested outside the interpolated
    range; the schedules are interpolants, not extrapolants."""
