"""Exception hierarchy shared by every module of the package."""


class WarpFinslerError(Exception):
    """Base class for all errors raised by warpfinsler."""


class ExpansionPointMismatch(WarpFinslerError, ValueError):
    """Two jets expanded at different points were combined."""


class SingularJetError(WarpFinslerError, ZeroDivisionError):
    """Division by a jet whose constant term is (numerically) zero."""

    def __init__(self, value, message=None):
        self.value = value
        super().__init__(message or f"division by jet with constant term {value!r}")


class JetDomainError(WarpFinslerError, ValueError):
    """Elementary function evaluated outside its domain (e.g. sqrt of a negative)."""


class DomainError(WarpFinslerError, ValueError):
    """A point or a metric parameter lies outside the admissible domain."""


class ConvexityError(DomainError):
    """The metric fails strong convexity at the requested point."""


class DegenerateMetricError(WarpFinslerError, ArithmeticError):
    """Omega or Lambda vanish, so the fundamental tensor is singular."""


class NumericError(WarpFinslerError, ArithmeticError):
    """A numerical procedure (quadrature, finite differences) failed."""
