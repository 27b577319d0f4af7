"""Exception hierarchy shared by every module."""


class DVRError(Exception):
    """Base class for all library errors."""


class RingMismatch(DVRError):
    pass


class NonUnit(DVRError):
    pass


class NotFiniteIndex(DVRError):
    pass


class HypothesisFailed(DVRError):
    """The Hensel valuation inequality does not hold at the starting point."""


class NoConvergence(DVRError):
    pass


class CharacteristicPositive(DVRError):
    pass


class ResidueFieldTooSmall(DVRError):
    pass


class DimensionMismatch(DVRError):
    pass


class NonInvertible(DVRError):
    pass


class NotSL(DVRError):
    pass


class PrecisionLoss(DVRError):
    pass


class ResourceCapExceeded(DVRError):
    pass


class NotSubgroup(DVRError):
    pass


class AbelianizationTrivial(DVRError):
    pass


class NonUnipotentInput(DVRError):
    pass


class StalledFlag(DVRError):
    pass


class MalformedFlag(DVRError):
    pass


class SingularMatrix(DVRError):
    pass
