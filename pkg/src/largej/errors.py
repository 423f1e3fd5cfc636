"""Exception hierarchy for the largej solver."""

from __future__ import annotations


class LargejError(Exception):
    """Base class for all solver errors."""


class InvalidQuantumNumberError(LargejError, ValueError):
    """Malformed angular-momentum arguments (negative j, |m| > j, bad parity)."""


class UnsupportedOperatorError(LargejError, ValueError):
    """Operator word outside the supported set."""


class InternalConsistencyError(LargejError):
    """The projection onto the radial sections did not close.

    Carries the name of the offending operator word.
    """

    def __init__(self, message: str, word: str = ""):
        super().__init__(message)
        self.word = word


class StructureError(LargejError):
    """Rank or block structure of the first-order system is not as required."""


class PoleError(LargejError):
    """Evaluation hit a zero of det V22 (or det of its reduced block).

    These are the energy-dependent singular points introduced by eliminating
    the algebraic components; evaluation exactly at one is an error, never an
    extrapolation.
    """

    def __init__(self, r: float, e: float, which: str = "V22"):
        super().__init__(f"singular elimination block {which} at r={r!r}, E={e!r}")
        self.r = r
        self.e = e
        self.which = which


class UnsupportedStructureError(LargejError):
    """The reduced 2x2 block multiplying the eliminated pair is not diagonal."""


class BranchError(LargejError):
    """A square-root transform hit a non-positive diagonal entry."""

    def __init__(self, r: float, e: float, entry: float):
        super().__init__(
            f"non-positive scaling entry {entry!r} at r={r!r}, E={e!r}"
        )
        self.r = r
        self.e = e
        self.entry = entry


class DomainError(LargejError, ValueError):
    """Kinematic argument outside the allowed domain (E <= 0, b below threshold)."""


class NoOrbitError(LargejError):
    """No stable circular orbit found in the search bracket."""


class InstabilityError(LargejError):
    """Circular orbit exists but the radial curvature is not positive."""


class ScalingError(LargejError):
    """Orbit asymptotics do not follow a clean power law; manual override advised."""


class NormalizationError(LargejError):
    """The rescaled effective potential is unbounded near the scaling point."""


class DegenerateSpectralParameterError(LargejError):
    """The coefficient multiplying the spectral parameter vanished."""


class ScalingInconsistencyError(LargejError):
    """Zeroth-order orbit conditions violated for the fitted scaling."""


class AmbiguityError(LargejError):
    """Channel-coupling classification fell between two cases."""

    def __init__(self, message: str, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


class NotCoupledDegenerateError(LargejError):
    """Channels submitted as degenerate-coupled disagree in their shared parameters."""


class FitQualityError(LargejError):
    """Trajectory fit residual beyond tolerance (non-linear trajectory)."""


class ConfigError(LargejError, ValueError):
    """Bad run configuration (CLI exit code 2)."""
