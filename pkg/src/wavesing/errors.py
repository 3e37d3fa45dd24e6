"""Exception hierarchy shared by every module.

Each error carries a short machine-readable ``kind`` used by the command
line driver when it reports a failure on standard error.
"""


class WaveSingError(Exception):
    """Base class for numerical failures raised by the library."""

    kind = "numerical"


class NumericalInputError(WaveSingError, ValueError):
    kind = "numerical-input"


class DomainError(WaveSingError, ValueError):
    """An argument lies outside the domain where an operation is defined."""

    kind = "domain"


class SingularRegimeError(WaveSingError):
    """Critical flow (Froude number one) or a vanishing denominator."""

    kind = "singular-regime"


class NoPhysicalRootError(WaveSingError):
    kind = "no-physical-root"


class CavitationError(WaveSingError):
    """Flow speed squared exceeds the Bernoulli constant (negative depth)."""

    kind = "cavitation"


class ParabolicDegeneracyError(WaveSingError):
    kind = "parabolic-degeneracy"


class RayExitError(WaveSingError):
    kind = "ray-exit"


class StepRejectionError(WaveSingError):
    kind = "step-rejection"


class RankError(WaveSingError):
    """The point handed to the classifier is not rank deficient."""

    kind = "not-rank-deficient"


class IndeterminatePhaseError(WaveSingError):
    kind = "indeterminate-phase"


class LoopResolutionError(WaveSingError):
    """Winding sum is not close to an integer; the loop is too coarse."""

    kind = "loop-resolution"


class ConvergenceError(WaveSingError):
    kind = "convergence"


class AmplitudeZeroError(WaveSingError):
    kind = "amplitude-zero"
