"""Exception hierarchy and warning categories for the qvsp package.

The command-line front end maps these onto its exit-code contract:
configuration problems exit with 2, computational failures (geometry,
singularities, brackets, non-convergence, modeling-assumption violations)
exit with 3, and self-test failures exit with 1.
"""


class QvspError(Exception):
    """Base class for all qvsp-specific errors."""


class ConfigError(QvspError):
    """Invalid or inconsistent experiment configuration (names the field)."""


class GeometryError(QvspError):
    """Geometrically impossible setup (path inside the sphere, blocked beam)."""


class SingularityError(QvspError):
    """Evaluation requested at a singular point of a kernel (coincident or
    on-origin coordinates)."""


class BracketError(QvspError):
    """Optimization bracket does not enclose an interior extremum."""


class ConvergenceError(QvspError):
    """Quadrature failed to reach the requested tolerance.

    The achieved error estimate is attached as ``error_estimate``.
    """

    def __init__(self, message, error_estimate=None, diagnostics=None):
        super().__init__(message)
        self.error_estimate = error_estimate
        self.diagnostics = diagnostics or {}


class ModelingError(QvspError):
    """A modeling assumption was violated (e.g. the reference interferometer
    arm is close enough to the scatterer to pick up a measurable phase)."""


class VdwRegimeWarning(UserWarning):
    """Emitted when a path leaves the near-field (nonretarded) regime where
    the quasistatic kernels are quantitatively reliable."""
