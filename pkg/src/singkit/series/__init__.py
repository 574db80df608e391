"""Exact truncated power series over Q and the oracles built on them."""

from .colength import Colength, colength, jacobian_colength, pair_colength
from .resolve import (EmbeddedCluster, IdealBasis, Membership, diagram_in, ideal_basis,
                      multiplicity_sequence, random_embedding, random_member, resolve,
                      virtual_multiplicity_check)
from .truncated import INF, TruncatedSeries, polynomial

__all__ = [
    "INF", "Colength", "EmbeddedCluster", "IdealBasis", "Membership", "TruncatedSeries",
    "colength", "diagram_in", "ideal_basis", "jacobian_colength", "multiplicity_sequence",
    "pair_colength", "polynomial", "random_embedding", "random_member", "resolve",
    "virtual_multiplicity_check",
]
