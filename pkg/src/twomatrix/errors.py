"""Exception types raised by the engine.

Every error carries enough context to be reported by the job runner under its
class name.
"""


class EngineError(Exception):
    """Base class for all engine errors."""


class UnsplittableDenominator(EngineError):
    """A polynomial does not split into linear factors over the active field."""

    def __init__(self, factor, message=None):
        self.factor = factor
        super().__init__(message or f"factor {factor} has no roots in the active field; use the float backend")


class ClusterError(EngineError):
    """Float root finder could not separate clustered roots."""

    def __init__(self, radius):
        self.radius = radius
        super().__init__(f"roots cluster within radius {radius}")


class DegenerateBranchPoint(EngineError):
    pass


class CollidingBranchPoints(EngineError):
    pass


class BranchValue(EngineError):
    pass


class NoGenusZeroSolution(EngineError):
    def __init__(self, residual, message=None):
        self.residual = residual
        super().__init__(message or f"Newton iteration failed, last residual {residual}")


class TruncationInsufficient(EngineError):
    pass


class NonzeroResidueAtPole(EngineError):
    pass


class UnsupportedOrder(EngineError):
    pass


class TruncationExceeded(EngineError):
    pass
