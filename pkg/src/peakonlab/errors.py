"""Exception types shared across the package."""


class PeakonLabError(Exception):
    pass


class DegenerateParams(PeakonLabError, ValueError):
    """Both nonlinear coefficients vanish; no amplitude equation exists."""


class NoRealAmplitude(PeakonLabError, ValueError):
    def __init__(self, discriminant, domain="line"):
        self.discriminant = float(discriminant)
        self.domain = domain
        super().__init__(f"discriminant {self.discriminant:g}")


class BranchUnavailable(PeakonLabError, ValueError):
    pass


class AtKink(PeakonLabError, ValueError):
    """Evaluation requested exactly on a crest line without a side."""


class ToleranceNotMet(PeakonLabError, RuntimeError):
    pass


class OracleToleranceNotMet(ToleranceNotMet):
    pass


class PointOnKink(PeakonLabError, ValueError):
    pass


class BadGrid(PeakonLabError, ValueError):
    pass


class NonFiniteState(PeakonLabError, FloatingPointError):
    def __init__(self, time):
        self.time = float(time)
        super().__init__(f"non-finite samples at t={self.time:.6g}")


class CflViolation(PeakonLabError, ValueError):
    pass


class InsufficientRecords(PeakonLabError, ValueError):
    pass


class InsufficientSignal(PeakonLabError, ValueError):
    """Peak position never moves; ``speed`` holds the (zero) slope."""

    def __init__(self, speed=0.0):
        self.speed = speed
        super().__init__("flat peak-position sequence")
