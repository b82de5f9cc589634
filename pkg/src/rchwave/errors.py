"""Exception types raised across the package."""


class RCHWaveError(Exception):
    """Base class for all package errors."""


class DomainError(RCHWaveError, ValueError):
    """A parameter lies outside the admissible range (e.g. omega <= 0, c <= omega/2)."""


class SymmetryViolation(RCHWaveError):
    """A field expected to be even about x = 0 has a non-negligible odd part."""


class GapViolation(RCHWaveError):
    """The ellipticity gap c - phi(x) > 0 failed at some grid point."""

    def __init__(self, message, c=None):
        super().__init__(message)
        self.c = c


class NoConvergence(RCHWaveError):
    """Newton iteration did not reach the requested tolerance."""

    def __init__(self, message, c=None, residual=None):
        super().__init__(message)
        self.c = c
        self.residual = residual


class TrivialCollapse(RCHWaveError):
    """The iterate converged to the zero solution."""


class StepUnderflow(RCHWaveError):
    """Adaptive step halving in continuation reduced the step below the floor."""


class SolvabilityViolation(RCHWaveError):
    """Right-hand side not orthogonal to the kernel, or the deflated solve failed to verify."""


class NearSingular(RCHWaveError):
    """The deflated operator is numerically singular (fold case: double kernel)."""


class InconsistentTheta(RCHWaveError):
    """The two routes to the Floquet constant disagree beyond tolerance."""


class IntegrationFailure(RCHWaveError):
    """The ODE initial-value solver failed."""


class NegativeCount(RCHWaveError):
    """A constrained eigenvalue count came out negative, signalling upstream failure."""


class BlowupDetected(RCHWaveError):
    """Sup-norm of the evolved field exceeded the blow-up threshold."""


class ConfigError(RCHWaveError):
    """Invalid or unparseable run configuration."""


class AliasingWarning(UserWarning):
    """Spectral tail of an evolved field is no longer negligible at this resolution."""
