"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`EllrcError`
so callers (and the CLI) can map failures to exit codes.
"""


class EllrcError(Exception):
    """Base class for all package errors."""

    #: payload serialized by the CLI next to the message
    def details(self):
        return {}


class DivisionByZero(EllrcError, ZeroDivisionError):
    pass


class SpecMismatch(EllrcError, ValueError):
    pass


class EnumerationTooLarge(EllrcError):
    pass


class SingularCurve(EllrcError, ValueError):
    pass


class PointNotOnCurve(EllrcError, ValueError):
    pass


class TorsionNotRational(EllrcError):
    pass


class SearchFailed(EllrcError):
    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = dict(stats or {})

    def details(self):
        return {"stats": self.stats}


class NonRationalSupport(EllrcError):
    pass


class UnsupportedSubgroupOrder(EllrcError, ValueError):
    pass


class CurveMismatch(EllrcError, ValueError):
    pass


class SingularFiber(EllrcError):
    pass


class SectionPoleAtGamma(EllrcError):
    pass


class NoGoodPoints(EllrcError):
    def __init__(self, message, bad_bound=None):
        super().__init__(message)
        self.bad_bound = bad_bound

    def details(self):
        return {"M": self.bad_bound}


class UnsupportedSurfaceMode(EllrcError):
    pass


class InvalidParameters(EllrcError, ValueError):
    pass


class UnderdeterminedErasure(EllrcError):
    pass


class NoCodewords(EllrcError):
    pass


class VerificationFailed(EllrcError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness

    def details(self):
        return {"witness": self.witness}


class ConstructionError(EllrcError):
    pass


class AbelViolation(ConstructionError):
    pass


class InsufficientPoints(ConstructionError):
    pass


class PrimitiveSearchFailed(ConstructionError):
    def __init__(self, message, feasibility=None):
        super().__init__(message)
        self.feasibility = dict(feasibility or {})

    def details(self):
        return {"feasibility": self.feasibility}
