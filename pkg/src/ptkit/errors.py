"""Exception types shared across the toolkit."""


class PtkitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(PtkitError):
    """Syntax error in an expression string.

    Carries the byte offset of the offending token in ``position``.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class DomainError(PtkitError):
    """Evaluation hit a pole or branch point exactly (ln 0, division by 0, ...)."""


class UnboundParameterError(PtkitError):
    """An expression references a parameter that is not bound."""


class SingularMatrixError(PtkitError):
    """2x2 matrix inversion requested for a (numerically) singular matrix."""


class ModulationZeroError(PtkitError):
    """A coupling modulation f1 or f2 vanishes at the requested time."""


class BranchTrackingError(PtkitError):
    """Continuation of sqrt(f1/f2) failed because f1/f2 passed through 0."""


class IntegrationError(PtkitError):
    """Adaptive integration failed (step underflow near a singular point)."""


class NonPeriodicError(PtkitError):
    """A Hamiltonian handed to the Floquet machinery is not T-periodic."""


class SpecFunRangeError(PtkitError):
    """Special-function argument outside the supported range (series cap)."""


class SpecFunPoleError(PtkitError):
    """Special-function evaluation at a pole (gamma at non-positive integers)."""


class DegenerateBasisError(PtkitError):
    """The two closed-form basis solutions are numerically dependent."""


class DesignError(PtkitError):
    """Inverse-design request that cannot be completed symbolically."""


class ConfigError(PtkitError):
    """Invalid run configuration (schema violation, bad expression, ...)."""
