"""Invariants of m-primary ideals on surface singularities: resolution graphs,
Enriques clusters, plane curve germs and an exact power-series oracle."""

from . import cluster, germ, resgraph, series
from .errors import (DomainError, InsufficientPrecision, InternalError, IrrationalPoint,
                     NonFiniteIntersection, NonIsolatedSingularity, OracleRefusal,
                     ParseError, PreconditionError, SingkitError)

__all__ = [
    "cluster", "germ", "resgraph", "series",
    "DomainError", "InsufficientPrecision", "InternalError", "IrrationalPoint",
    "NonFiniteIntersection", "NonIsolatedSingularity", "OracleRefusal", "ParseError",
    "PreconditionError", "SingkitError",
]
__version__ = "0.1.0"
