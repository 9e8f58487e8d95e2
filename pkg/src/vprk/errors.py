"""Exception types shared across the package."""


class VprkError(Exception):
    """Base class for all errors raised by this package."""


class SingularMatrix(VprkError):
    """LU elimination hit a pivot below the singularity threshold."""


class SingularMassMatrix(SingularMatrix):
    """The mass matrix M(q) is numerically singular at the given point."""


class SingularStageJacobian(SingularMatrix):
    """The Newton matrix of the stage equations is numerically singular."""


class NewtonDivergence(VprkError):
    """Newton iteration failed to reach the residual tolerance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InconsistentState(VprkError):
    """Phase point too far off the constraint p = alpha(q) for the step size."""


class DomainError(VprkError):
    """Model evaluated outside its domain of definition."""


class UnsupportedStageCount(VprkError, ValueError):
    """Requested a tableau stage count outside the shipped range."""


class ZeroWeight(VprkError, ValueError):
    """Conjugate tableau undefined because some quadrature weight is zero."""


class UnsupportedSystem(VprkError):
    """Operation requires a structure (e.g. linear alpha) the system lacks."""


class FewerThanTwoPoints(VprkError, ValueError):
    """Order fit requires at least two data points."""


class ConfigError(VprkError):
    """Invalid or incomplete run configuration."""
