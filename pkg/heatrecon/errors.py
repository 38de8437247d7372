"""Module for the exception hierarchy and its mapping to process exit codes."""

from heatrecon.constants import EXIT_CONFIG, EXIT_IO, EXIT_SOLVER, EXIT_UNEXPECTED


class ReconError(Exception):
    """Base class of every error raised on purpose by the package.

    Attributes:
        exit_code: the process exit code reported by the CLI.
        category: a short machine-readable name of the error family.
    """

    exit_code = EXIT_UNEXPECTED
    category = "error"


class ConfigError(ReconError):
    """An input or parameter violates a precondition. Raised before any solve."""

    exit_code = EXIT_CONFIG
    category = "config"


class InvalidExtent(ConfigError):
    """Grid bounds or element counts are invalid."""


class UnsupportedOrder(ConfigError):
    """Quadrature order outside the supported set."""


class UnsupportedDerivative(ConfigError):
    """A derivative was requested from a space that cannot provide it."""


class UnsupportedSpace(ConfigError):
    """A formulation received a finite-element space it cannot work with."""


class OmegaOutsideDomain(ConfigError):
    """The observation interval is not strictly inside the spatial domain."""


class DegenerateOmega(ConfigError):
    """The observation interval is empty."""


class NonPositiveTime(ConfigError):
    """A weight was evaluated at t <= 0."""


class MemberMismatch(ConfigError):
    """Weight members that cannot be compared or do not exist in a family."""


class AlphaOutOfRange(ConfigError):
    """A stabilization parameter is outside (0, 1)."""


class NonPositiveEps(ConfigError):
    """The quasi-reversibility parameter is not positive."""


class InvalidCoefficients(ConfigError):
    """Coefficients violate ellipticity or finiteness."""


class LayoutMismatch(ConfigError):
    """An observation set does not match the grid it is used with."""


class UnknownPreset(ConfigError):
    """A coefficient or formulation preset name is not known."""


class IoError(ReconError):
    """A file could not be read or written."""

    exit_code = EXIT_IO
    category = "io"


class SolverError(ReconError):
    """A numerical solve failed."""

    exit_code = EXIT_SOLVER
    category = "solver"


class SingularStep(SolverError):
    """A time-step matrix of the forward solver is numerically singular."""


class SingularBm(SolverError):
    """The flux mass matrix of the mixed forward solver is singular."""


class FactorizationFailure(SolverError):
    """The saddle-point factorization broke down."""


class SingularAr(SolverError):
    """The augmented primal block could not be factorized."""


class NonConvergedEigen(SolverError):
    """An eigenvalue iteration did not converge."""


class MaxIterationsExceeded(SolverError):
    """An iterative solver reached its iteration limit.

    Attributes:
        report: the report built from the last iterate.
    """

    def __init__(self, message: str, report: object = None) -> None:
        super().__init__(message)
        self.report = report
