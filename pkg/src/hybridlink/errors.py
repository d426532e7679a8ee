"""
Error hierarchy for hybridlink.

Every error carries the process exit code the CLI reports for it:
configuration and parameter problems exit with 2, numerical failures with 3.
"""


class HybridLinkError(Exception):
    """Base class for all hybridlink errors."""

    exit_code: int = 1


class ConfigError(HybridLinkError):
    """Invalid configuration input."""

    exit_code = 2


class ConfigParseError(ConfigError):
    """A scenario file could not be parsed."""


class ScenarioUnknownError(ConfigError):
    """The requested scenario is not registered."""


class ParameterError(ConfigError):
    """A physical parameter set violates a precondition."""


class NegativeRateError(ParameterError):
    """A decay rate is negative."""


class RateSumMismatchError(ParameterError):
    """The decay rates do not add up to the total linewidth."""


class ResonanceInfeasibleError(ParameterError):
    """The dressed splitting cannot be tuned to the qubit splitting."""


class DegenerateSplittingError(ParameterError):
    """The dressed splitting vanishes (V = 0 and delta_0 = 0)."""


class DomainError(ParameterError):
    """An argument lies outside the domain of a formula."""


class GridTooCoarseError(ParameterError):
    """The finite-difference grid does not resolve the geometry."""


class NumericalError(HybridLinkError):
    """A numerical procedure failed."""

    exit_code = 3


class SingularMatrixError(NumericalError):
    """A non-Hermitian Hamiltonian is numerically singular."""


class IntegrationFailureError(NumericalError):
    """The master-equation integrator did not reach the final time."""


class NonConvergenceError(NumericalError):
    """An iterative solver stopped above its tolerance."""


class NonFiniteOutputError(NumericalError):
    """A result table contains NaN or infinite values."""
