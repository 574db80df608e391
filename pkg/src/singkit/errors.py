"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class SingkitError(Exception):
    """Base class for every error raised by singkit."""


class DomainError(SingkitError, ValueError):
    """An argument refers to something outside the object it is applied to."""


class PreconditionError(SingkitError, ValueError):
    """An operation was called on data that violates its precondition."""


class ParseError(SingkitError, ValueError):
    pass


class InternalError(SingkitError, RuntimeError):
    """Raised when a consistency check that should always hold fails."""


class NonFiniteIntersection(SingkitError):
    """Two germs share a branch, so their intersection number is infinite."""


class OracleRefusal(SingkitError):
    """The exact oracle cannot certify an answer from the data it was given."""


class InsufficientPrecision(OracleRefusal):
    pass


class IrrationalPoint(OracleRefusal):
    def __init__(self, degree: int, where: str = ""):
        self.degree = degree
        msg = f"infinitely near point defined over an extension of degree {degree}"
        if where:
            msg += f" (at {where})"
        super().__init__(msg)


class NonIsolatedSingularity(OracleRefusal):
    pass


class EliminationFailed(OracleRefusal):
    pass
