"""Exception and warning types shared across the package."""


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class InvalidEnergies(EngineError, ValueError):
    """Energy expectation values violate a physical bound beyond round-off."""


class SizeExceeded(EngineError, ValueError):
    """Requested system is larger than the dense solvers allow."""


class ConvergenceFailure(EngineError, RuntimeError):
    """An eigensolver did not converge."""


class DelegationNotice(EngineError, ValueError):
    """The requested case is handled by a different model module."""


class DomainError(EngineError, ValueError):
    """Argument lies outside the domain of a closed-form relation."""


class IntegrationFailure(EngineError, RuntimeError):
    """The ODE integrator gave up (step-size collapse or similar)."""


class DegenerateRelaxation(EngineError, ValueError):
    """The slowest relaxation rate vanishes, so no relaxation time exists."""


class NotPositiveDefinite(EngineError, ValueError):
    """A coupling matrix is not symmetric positive definite."""


class TruncationInsufficient(EngineError, ValueError):
    """A truncated expansion misses more probability than allowed."""


class ConfigError(EngineError, ValueError):
    """Invalid sweep or CLI configuration."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class RegimeWarning(UserWarning):
    """An asymptotic formula is being used outside its regime of validity."""
