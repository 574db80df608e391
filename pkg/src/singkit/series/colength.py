"""Colengths of ideals of C{x, y} generated by (truncated) series.

``dim O/(J + m^k)`` is computed for each level ``k`` as the codimension of
the span of all ``monomial * generator`` products taken modulo ``m^k``.  The
first level where the codimension stops growing certifies ``m^(k-1) in J``
(Nakayama), and the colength is that codimension.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Sequence

import flint

from ..errors import InsufficientPrecision, NonFiniteIntersection, NonIsolatedSingularity
from .truncated import TruncatedSeries

DEFAULT_DMAX = 96


@dataclass(frozen=True)
class Colength:
    value: int
    certified_precision: int  # level at which m^k in J was certified

    def __int__(self) -> int:
        return self.value


def _monomial_index(k: int) -> dict[tuple[int, int], int]:
    idx = {}
    for d in range(k):
        for i in range(d, -1, -1):
            idx[(i, d - i)] = len(idx)
    return idx


def _codim(gens: Sequence[TruncatedSeries], k: int) -> int:
    """dim O/(J + m^k)."""
    if k == 0:
        return 0
    idx = _monomial_index(k)
    ncols = len(idx)
    rows: list[list[int]] = []
    for g in gens:
        if g.prec is not None and g.prec < k:
            raise InsufficientPrecision(f"generator known only below degree {g.prec}, need {k}")
        terms = [(ij, v) for ij, v in g.coeffs.items() if ij[0] + ij[1] < k]
        if not terms:
            continue
        r = min(i + j for (i, j), _ in terms)
        den = lcm(*(v.denominator for _, v in terms))
        ints = [((i, j), int(v * den)) for (i, j), v in terms]
        for d in range(k - r):
            for a in range(d, -1, -1):
                b = d - a
                row = [0] * ncols
                for (i, j), v in ints:
                    if a + b + i + j < k:
                        row[idx[(a + i, b + j)]] = v
                rows.append(row)
    if not rows:
        return ncols
    mat = flint.fmpz_mat(len(rows), ncols, [v for row in rows for v in row])
    return ncols - mat.rank()


def colength(gens: Sequence[TruncatedSeries], dmax: int = DEFAULT_DMAX) -> Colength:
    """Colength of the ideal generated by ``gens``, certified, or an error."""
    cache: dict[int, int] = {0: 0}

    def codim(k: int) -> int:
        if k not in cache:
            cache[k] = _codim(gens, k)
        return cache[k]

    def stable(k: int) -> bool:
        return codim(k) == codim(k - 1)

    avail = min([g.prec for g in gens if g.prec is not None] + [dmax])
    # exponential then binary search for the first stable level
    lo, k = 0, 1
    while True:
        if k >= avail:
            if avail > lo and stable(avail):
                hi = avail
                break
            if avail < dmax:
                raise InsufficientPrecision(f"colength did not stabilize within precision {avail}")
            raise _Unstable(dmax)
        if stable(k):
            hi = k
            break
        lo, k = k, k * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if stable(mid):
            hi = mid
        else:
            lo = mid
    return Colength(codim(hi - 1), hi)


class _Unstable(Exception):
    def __init__(self, dmax: int):
        self.dmax = dmax


def jacobian_colength(f: TruncatedSeries, dmax: int = DEFAULT_DMAX) -> Colength:
    """Milnor number dim O/(f_x, f_y) of a plane germ."""
    if f.exact:
        from .resolve import repeated_local_factor  # local import avoids a cycle

        bad = repeated_local_factor(f)
        if bad is not None:
            raise NonIsolatedSingularity(f"non-isolated singularity: ({bad})^2 divides f")
    try:
        return colength([f.derivative("x"), f.derivative("y")], dmax)
    except _Unstable as exc:
        if f.exact:
            raise InsufficientPrecision(f"Milnor number exceeds what level {exc.dmax} can certify")
        raise NonIsolatedSingularity(
            f"Jacobian colength did not stabilize by level {exc.dmax}; "
            "possibly non-isolated singularity") from None


def pair_colength(f: TruncatedSeries, g: TruncatedSeries, dmax: int = DEFAULT_DMAX) -> Colength:
    """dim O/(f, g), the degree of the map (f, g)."""
    if f.exact and g.exact:
        from .resolve import common_local_factor

        common = common_local_factor(f, g)
        if common is not None:
            raise NonFiniteIntersection(f"common component {common} through the origin")
    try:
        return colength([f, g], dmax)
    except _Unstable as exc:
        if f.exact and g.exact:
            raise InsufficientPrecision(f"colength exceeds what level {exc.dmax} can certify")
        raise NonFiniteIntersection(
            f"colength of (f, g) did not stabilize by level {exc.dmax}") from None
