"""Exception hierarchy.

Every error raised deliberately by the library derives from :class:`LYChaosError`
so the CLI can map it onto exit code 1 in one place.
"""


class LYChaosError(Exception):
    """Base class for all library errors."""


class MalformedSpec(LYChaosError):
    pass


class ZeroWeight(MalformedSpec):
    pass


class BoundViolation(MalformedSpec):
    pass


class OutOfDomain(LYChaosError):
    pass


class SideMismatch(LYChaosError):
    pass


class WrongSide(SideMismatch):
    """A decider was handed a weight sequence on the wrong index domain."""


class NotBilateral(WrongSide):
    pass


class EmptyRange(LYChaosError):
    pass


class DecayNotEstablished(LYChaosError):
    pass


class DivergenceNotEstablished(LYChaosError):
    pass


class DeciderNotEstablished(LYChaosError):
    pass


class TargetsOverlap(LYChaosError):
    pass


class VerificationFailed(LYChaosError):
    def __init__(self, message, failure=None):
        super().__init__(message)
        self.failure = failure


class DepthInfeasible(LYChaosError):
    def __init__(self, message, max_depth):
        super().__init__(message)
        self.max_depth = max_depth
