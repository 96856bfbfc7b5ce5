"""Exception hierarchy shared by all interp_lab modules."""

from __future__ import annotations


class InterpLabError(Exception):
    """Base class for every error raised by this package."""


# linear algebra
class NotSymmetric(InterpLabError):
    pass


class NoConvergence(InterpLabError):
    pass


class SingularMatrix(InterpLabError):
    pass


class NumericalBreakdown(InterpLabError):
    pass


# geometry
class DegenerateSampleSet(InterpLabError):
    pass


class DegenerateSwap(InterpLabError):
    pass


class AmbiguousRegion(InterpLabError):
    """Raised when a region-deciding quantity sits within tolerance of zero.

    ``candidates`` lists every region tag reachable by resolving the
    near-zero quantities either way.
    """

    def __init__(self, message: str, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


# bounds
class OutsideHull(InterpLabError):
    pass


class ZeroLagrangeValue(InterpLabError):
    pass


class SingularPartition(InterpLabError):
    pass


class HypothesisViolated(InterpLabError):
    pass


# witness
class MembershipViolation(InterpLabError):
    def __init__(self, message: str, pair=None, violation: float = 0.0):
        super().__init__(message)
        self.pair = pair
        self.violation = violation


# dfo
class BudgetExhausted(InterpLabError):
    pass


# cli / io
class ProblemFileError(InterpLabError):
    pass
