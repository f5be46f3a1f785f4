"""Exception hierarchy for tlsgap."""


class TlsGapError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TlsGapError, ValueError):
    """An argument lies outside the domain of the operation."""


class PerfectGapError(DomainError):
    """The suppression depth reached 1, so the TLS lifetime diverges."""


class DivergenceError(TlsGapError, ArithmeticError):
    """An angular average is infinite (depth 1 on a set of positive weight)."""


class StepSizeError(DomainError):
    """A fixed-step discretisation was asked to run with too coarse a step."""


class SizeError(DomainError):
    """The problem is too large for a dense reference solver."""


class ToleranceError(TlsGapError, RuntimeError):
    """An adaptive integrator could not meet the requested local error."""


class NormGuardError(TlsGapError, FloatingPointError):
    """State norm grew beyond what a dissipative evolution allows."""


class ConfigError(TlsGapError, ValueError):
    """Invalid experiment configuration."""
