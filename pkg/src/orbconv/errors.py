"""Exception hierarchy.

The CLI maps these onto exit codes: argument problems give 2, an exhausted
quadrature budget gives 3 and a violated invariant gives 4.
"""


class OrbconvError(Exception):
    """Base class for package errors."""


class UnsupportedSpaceError(OrbconvError, ValueError):
    """The operation has no implementation for this space (rank, realization)."""


class RealizationError(OrbconvError, ValueError):
    """A matrix fails the defining invariant of its realization."""


class QuadratureBudgetError(OrbconvError, RuntimeError):
    """Requested accuracy is out of reach within the configured budget."""


class ThresholdError(OrbconvError, ValueError):
    """The convolution length is below the threshold an operation needs."""


class SingularPointError(OrbconvError, ValueError):
    """The requested point is a singularity of the density."""


class InvariantViolation(OrbconvError, AssertionError):
    """A computed result breaks a documented invariant."""
