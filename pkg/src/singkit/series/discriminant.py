"""Finite projections p = (f, g) of the plane germ, their pencils and discriminants.

A line ``L = {alpha u + beta v = 0}`` of the target pulls back to the
member ``alpha f + beta g`` of the pencil.  The intersection of the
discriminant with ``L`` is computed in two independent ways: from an
explicit equation of the discriminant obtained by elimination, and by the
projection formula ``(p_*[C] . L) = dim O/(jac(f, g), alpha f + beta g)``
with ``C`` the critical curve.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import flint

from ..errors import (EliminationFailed, NonFiniteIntersection, OracleRefusal,
                      PreconditionError, SingkitError)
from .colength import Colength, jacobian_colength, pair_colength
from .truncated import TruncatedSeries

DEFAULT_SAMPLES: tuple[tuple[int, int], ...] = (
    (1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1), (1, 3), (3, -2))


def jacobian_determinant(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    return f.derivative("x") * g.derivative("y") - f.derivative("y") * g.derivative("x")


@dataclass(frozen=True)
class ProjectionPair:
    f: TruncatedSeries
    g: TruncatedSeries

    def __post_init__(self) -> None:
        for h in (self.f, self.g):
            if h.is_zero() or h.value_at_origin():
                raise PreconditionError(f"component {h} must vanish at the origin and be nonzero")

    def degree(self, dmax: int = 96) -> Colength:
        """deg(p) = dim O/(f, g); raises NonFiniteIntersection if p is not finite."""
        return pair_colength(self.f, self.g, dmax)

    def member(self, alpha, beta) -> TruncatedSeries:
        return self.f * Fraction(alpha) + self.g * Fraction(beta)


@dataclass(frozen=True)
class PencilSample:
    alpha: Fraction
    beta: Fraction
    mu: int | None
    rhs: int | None          # mu + deg(p) - 1
    error: str | None = None
    special: bool = False


@dataclass(frozen=True)
class PencilScan:
    degree: int
    samples: tuple[PencilSample, ...]
    certified_precision: int

    @property
    def generic_mu(self) -> int | None:
        mus = [s.mu for s in self.samples if s.mu is not None]
        return min(mus) if mus else None


def pencil_scan(p: ProjectionPair, samples: Iterable[tuple] = DEFAULT_SAMPLES,
                dmax: int = 96) -> PencilScan:
    """Milnor numbers of the pencil members; members that fail are reported, not raised.

    A sample is flagged special when its member is not reduced or has
    Milnor number above the least one seen in the scan.
    """
    deg = p.degree(dmax)
    rows: list[tuple[Fraction, Fraction, int | None, str | None]] = []
    prec = deg.certified_precision
    for a, b in samples:
        a, b = Fraction(a), Fraction(b)
        if a == 0 and b == 0:
            raise PreconditionError("(0, 0) is not a point of the pencil")
        h = p.member(a, b)
        try:
            if h.is_zero():
                raise NonFiniteIntersection("pencil member vanishes identically")
            mu = jacobian_colength(h, dmax)
            rows.append((a, b, mu.value, None))
            prec = max(prec, mu.certified_precision)
        except SingkitError as exc:
            rows.append((a, b, None, f"{type(exc).__name__}: {exc}"))
    mus = [r[2] for r in rows if r[2] is not None]
    low = min(mus) if mus else None
    out = tuple(
        PencilSample(a, b, mu, None if mu is None else mu + deg.value - 1, err,
                     special=mu is None or mu > low)
        for a, b, mu, err in rows)
    return PencilScan(deg.value, out, prec)


# --- discriminant by elimination -------------------------------------------------

_UVT = flint.fmpq_mpoly_ctx.get(("u", "v", "t"), "lex")
_T = flint.fmpq_poly([0, 1])


def _q(v: Fraction) -> flint.fmpq:
    return flint.fmpq(v.numerator, v.denominator)


def _linear_part(h: TruncatedSeries) -> tuple[Fraction, Fraction] | None:
    if not h.exact or any(i + j != 1 for i, j in h.coeffs):
        return None
    return h.coeffs.get((1, 0), Fraction(0)), h.coeffs.get((0, 1), Fraction(0))


def _substitute(h: TruncatedSeries, x: flint.fmpq_mpoly, y: flint.fmpq_mpoly) -> flint.fmpq_mpoly:
    out = _UVT.from_dict({})
    for (i, j), c in h.coeffs.items():
        out += _q(c) * x ** i * y ** j
    return out


@dataclass(frozen=True)
class Discriminant:
    """Equation of the divisorial discriminant near the origin, in target coordinates (u, v)."""

    equation: flint.fmpq_mpoly   # in the context (u, v, t), free of t
    swapped: bool                # True when the roles of f and g were exchanged
    multiplicity: int

    def _uv(self, u: Fraction, v: Fraction) -> dict[int, Fraction]:
        """Coefficients of Delta(u * tau, v * tau) as a polynomial in tau."""
        out: dict[int, Fraction] = {}
        for mon, c in self.equation.to_dict().items():
            i, j = int(mon[0]), int(mon[1])
            c = flint.fmpq(c)
            w = Fraction(int(c.p), int(c.q)) * u ** i * v ** j
            out[i + j] = out.get(i + j, Fraction(0)) + w
        return {k: w for k, w in out.items() if w}

    def line_intersection(self, alpha, beta) -> int | None:
        """(Delta . L)_0 for L = {alpha u + beta v = 0}; None if L lies in Delta."""
        a, b = Fraction(alpha), Fraction(beta)
        if self.swapped:
            a, b = b, a
        terms = self._uv(b, -a)
        return min(terms) if terms else None


def discriminant_by_elimination(p: ProjectionPair) -> Discriminant:
    """Discriminant of p from the critical curve, for maps with a linear component.

    After a linear change of source coordinates the map reads
    ``(s, t) -> (s, G(s, t))`` and the critical curve is ``G_t = 0``.  When
    ``G_t`` is monic in ``t`` the push-forward of its structure sheaf is free
    over the ``u``-line and its Fitting ideal is generated by
    ``Res_t(G(u, t) - v, G_t(u, t))``, which is what is returned.
    """
    for swapped, (lin, other) in enumerate(((p.f, p.g), (p.g, p.f))):
        ab = _linear_part(lin)
        if ab is not None and other.exact:
            break
    else:
        raise EliminationFailed(
            "elimination is implemented only for polynomial maps with a linear component")
    a, b = ab
    u, v, t = _UVT.gens()
    # express x, y through s = a x + b y (renamed u) and a complementary t
    if b != 0:
        x, y = t, (u - _q(a) * t) * _q(1 / b)
    else:
        x, y = (u - _q(b) * t) * _q(1 / a), t
    G = _substitute(other, x, y)
    Gt = G.derivative(2)
    if Gt.is_zero():
        raise NonFiniteIntersection("the map is not finite: its second component does not depend on t")
    if Gt.degrees()[2] == 0:
        return Discriminant(_UVT.from_dict({(0, 0, 0): 1}), bool(swapped), 0)
    lead = _leading_in_t(Gt)
    if not lead.is_constant():
        raise EliminationFailed("critical curve is not finite over the u-line in these coordinates")
    # other points of the critical curve in the fibre over 0 would pollute the local order
    g0, gt0 = _restrict_u0(G), _restrict_u0(Gt)
    common = g0.gcd(gt0)
    if common.degree() > 0 and common != _T ** common.degree():
        raise EliminationFailed("the critical curve meets the fibre over 0 away from the origin")
    res = (G - v).resultant(Gt, "t")
    if res.is_zero():
        raise EliminationFailed("resultant vanishes identically; critical curve is not reduced-tractable")
    mult = min(int(i) + int(j) for (i, j, _) in res.to_dict())
    return Discriminant(res, bool(swapped), mult)


def _leading_in_t(h: flint.fmpq_mpoly) -> flint.fmpq_mpoly:
    d = h.degrees()[2]
    return _UVT.from_dict({(i, j, 0): c for (i, j, k), c in h.to_dict().items() if k == d})


def _restrict_u0(h: flint.fmpq_mpoly) -> flint.fmpq_poly:
    coeffs: dict[int, flint.fmpq] = {}
    for (i, j, k), c in h.to_dict().items():
        if i == 0 and j == 0:
            coeffs[k] = flint.fmpq(c)
    top = max(coeffs, default=-1)
    return flint.fmpq_poly([coeffs.get(k, 0) for k in range(top + 1)])


def projection_line_intersection(p: ProjectionPair, alpha, beta, dmax: int = 96) -> int:
    """(Delta . L)_0 by the projection formula: dim O/(jac(f, g), alpha f + beta g)."""
    jac = jacobian_determinant(p.f, p.g)
    h = p.member(alpha, beta)
    if jac.is_zero():
        raise NonFiniteIntersection("Jacobian determinant vanishes identically")
    if jac.value_at_origin():
        return 0
    return pair_colength(jac, h, dmax).value


@dataclass(frozen=True)
class LineCheck:
    alpha: Fraction
    beta: Fraction
    lhs: int | None          # (Delta . L)_0
    rhs: int | None          # mu(p^-1 L) + deg(p) - 1
    transversal: bool
    error: str | None = None

    @property
    def agrees(self) -> bool:
        return self.error is None and self.lhs == self.rhs


def le_greuel_check(p: ProjectionPair, samples: Iterable[tuple] = DEFAULT_SAMPLES,
                    dmax: int = 96, route: str = "elimination") -> list[LineCheck]:
    """Compare the discriminant-line intersection with mu + deg - 1 line by line.

    ``route`` is "elimination" (explicit discriminant equation) or
    "projection" (projection formula on the critical curve).  Lines are
    transversal when their intersection equals the multiplicity of the
    discriminant.
    """
    samples = list(samples)
    scan = pencil_scan(p, samples, dmax)
    if route == "elimination":
        disc = discriminant_by_elimination(p)
        lhs_of = disc.line_intersection
        e_delta: int | None = disc.multiplicity
    elif route == "projection":
        def lhs_of(a, b):
            return projection_line_intersection(p, a, b, dmax)
        e_delta = None
    else:
        raise ValueError(f"unknown route {route!r}")
    rows = []
    lhs_values: list[int | None] = []
    for s in scan.samples:
        try:
            lhs_values.append(lhs_of(s.alpha, s.beta))
        except (OracleRefusal, NonFiniteIntersection):
            lhs_values.append(None)
    if e_delta is None:
        finite = [x for x in lhs_values if x is not None]
        e_delta = min(finite) if finite else None
    for s, lhs in zip(scan.samples, lhs_values):
        rows.append(LineCheck(s.alpha, s.beta, lhs, s.rhs,
                              transversal=lhs is not None and lhs == e_delta, error=s.error))
    return rows


def generic_discriminant_multiplicity(p: ProjectionPair, samples: Sequence[tuple] = DEFAULT_SAMPLES,
                                      dmax: int = 96) -> int:
    """e(Delta_p, 0) as the least (Delta . L)_0 over the sampled lines (projection formula)."""
    vals = []
    for a, b in samples:
        try:
            vals.append(projection_line_intersection(p, a, b, dmax))
        except (OracleRefusal, NonFiniteIntersection):
            continue
    if not vals:
        raise EliminationFailed("no sampled line meets the discriminant properly")
    return min(vals)


__all__ = [
    "DEFAULT_SAMPLES", "Discriminant", "LineCheck", "PencilSample", "PencilScan", "ProjectionPair",
    "discriminant_by_elimination", "generic_discriminant_multiplicity", "jacobian_determinant",
    "le_greuel_check", "pencil_scan", "projection_line_intersection",
]
