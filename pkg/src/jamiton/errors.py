"""Exception types shared across the package.

Failures that carry physical meaning (no wave exists, density reached the jam
limit) get their own classes so callers can distinguish a negative result from
a numerical breakdown.
"""

__all__ = [
    "JamitonError",
    "DomainError",
    "NoUnstableBand",
    "NoJamiton",
    "ConvergenceFailure",
    "SonicSingularity",
    "DegenerateSonic",
    "NoJumpRoot",
    "SonicEscapeFailure",
    "IntegrationOutOfRange",
    "WavelengthInfeasible",
    "InvalidPerturbation",
    "DegenerateSpacing",
    "DensityOverflow",
    "StepTooLarge",
    "InsufficientOutputRate",
    "NothingToCompare",
    "ConfigError",
    "ZeroStrengthShock",
]


class JamitonError(Exception):
    """Base class for all package errors."""


class DomainError(JamitonError, ValueError):
    """An argument lies outside the physical domain of a closure or type."""


class NoUnstableBand(JamitonError):
    """Uniform flow is linearly stable at every density; no band exists."""


class NoJamiton(JamitonError):
    """No self-sustained wave exists for the requested background density."""


class ConvergenceFailure(JamitonError):
    """A root-find or iteration failed inside its theoretical bracket."""


class SonicSingularity(JamitonError):
    """Wave ODE evaluated where the denominator vanishes but the numerator does not."""


class DegenerateSonic(JamitonError):
    """Both the numerator and denominator derivatives vanish at the sonic point."""


class NoJumpRoot(JamitonError):
    """No admissible conjugate state exists across the shock."""


class SonicEscapeFailure(JamitonError):
    """Profile integration stalled leaving the sonic point (offset too small)."""


class IntegrationOutOfRange(JamitonError):
    """Profile integration left the admissible speed interval."""


class WavelengthInfeasible(JamitonError):
    """No periodic wave with the requested wavelength exists for this frame."""


class InvalidPerturbation(JamitonError):
    """Initial displacement large enough to fold the particle ordering."""


class DegenerateSpacing(JamitonError):
    """Coincident neighbor particles; density estimate undefined."""


class DensityOverflow(JamitonError):
    """Density reached the jam limit somewhere; the run aborts.

    Carries the failure time and, when raised out of a full run, the
    snapshots collected up to the abort.
    """

    def __init__(self, message, t=None, snapshots=None):
        super().__init__(message)
        self.t = t
        self.snapshots = snapshots


class StepTooLarge(JamitonError):
    """Particle ordering violated even after repeated step halving."""


class InsufficientOutputRate(JamitonError):
    """Snapshot cadence too coarse for tracer integration."""


class NothingToCompare(JamitonError):
    """No wave detected in the simulation output."""


class ConfigError(JamitonError):
    """Scenario file rejected; message names the offending key and line."""


class ZeroStrengthShock(UserWarning):
    """The two conjugate shock states merged at the sonic speed."""
