"""Exception hierarchy for coilcontact.

Everything raised on purpose derives from CoilContactError so callers (and
the CLI) can map failures to exit codes without fishing for ValueError.
"""


class CoilContactError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(CoilContactError):
    """Bad or inconsistent run configuration (CLI exit code 2)."""


class SolverError(CoilContactError):
    """Base class for numerical failures (CLI exit code 3)."""


# -- coefficients ------------------------------------------------------------

class NonPositiveRadius(ConfigError):
    """Cylinder radius must be positive."""


class EvaluationRange(SolverError):
    """Coefficient model evaluated outside its working range |u| <= 1e6."""


# -- grids and domains -------------------------------------------------------

class DomainTooShort(ConfigError):
    """Operation needs a unit constraint window, so T > 1 is required."""


class GridAlignmentError(ConfigError):
    """Grid spacing does not divide the unit window length exactly."""


# -- contact structure -------------------------------------------------------

class InvalidInterval(ConfigError):
    """Contact interval ends out of order or window leaves the domain."""


class NegativeForce(SolverError):
    """Contact forces are one-sided; a negative window integral G is invalid."""


# -- integration and shooting ------------------------------------------------

class BlowUp(SolverError):
    """Trajectory left the admissible range (|u| or |u'| beyond 1e8)."""


class CoercivityLoss(SolverError):
    """a(u) dropped below half its stored lower bound along a trajectory."""


class NoConvergence(SolverError):
    """Newton iteration did not reach the requested tolerance."""


class NegativeG(SolverError):
    """Converged window force is negative: no contact at this length."""


class AdmissibilityViolation(SolverError):
    """Expanded solution violates the window constraint beyond tolerance."""


class NoTurningPoint(SolverError):
    """No Hamiltonian level gives the requested half-period."""


# -- continuation ------------------------------------------------------------

class NotConverged(SolverError):
    """Continuation was seeded from a solution that is not converged."""


class StepFailure(SolverError):
    """Continuation step failed after exhausting step halvings."""


# -- minimization ------------------------------------------------------------

class MaxIterations(SolverError):
    """Outer augmented-Lagrangian loop hit its iteration cap."""
