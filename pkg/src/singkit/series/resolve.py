"""Embedded clusters, iterated blow-ups and the ideals I_K over Q.

Chart conventions.  At every infinitely near point the local coordinates
``(x, y)`` are chosen so that the exceptional curve of the parent is
``{x = 0}`` and, at a satellite point, the other exceptional curve through
it is ``{y = 0}``.  A point of the exceptional line of ``p`` is a direction
``c``: either a rational number (the line ``y = c x``, chart
``(x, x (y + c))``) or ``INF`` (the line ``x = 0``, chart ``(x y, x)``).
Hence at a non-root point ``INF`` is the corner with the parent's curve and,
at a satellite point, ``0`` is the corner with the curve of its satellite
target.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import flint

from .. import cluster as cl
from ..cluster import Cluster, Point, WeightedCluster
from ..errors import (InsufficientPrecision, InternalError, IrrationalPoint,
                      NonFiniteIntersection, PreconditionError)
from ..germ import GermCluster, Matching
from .truncated import INF, Direction, TruncatedSeries

MAX_POINTS = 4096


@dataclass(frozen=True)
class EmbeddedCluster:
    """A weighted cluster whose free points carry their chart coordinate."""

    weighted: WeightedCluster
    coords: Mapping[str, Direction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        c = self.weighted.cluster
        coords = {}
        for p in c.points:
            if p.is_root:
                continue
            if p.is_free:
                if p.id not in self.coords:
                    raise PreconditionError(f"free point {p.id!r} needs a coordinate")
                d = self.coords[p.id]
                coords[p.id] = d if d is INF else Fraction(d)
            elif p.id in self.coords:
                raise PreconditionError(f"satellite point {p.id!r} takes no coordinate")
        extra = set(self.coords) - set(coords)
        if extra - {p.id for p in c.points if not p.is_free}:
            raise PreconditionError(f"coordinates for unknown points {sorted(extra)}")
        object.__setattr__(self, "coords", coords)
        for p in c.ids:
            seen = set()
            for q in c.children(p):
                d = self.direction(q)
                if d in seen:
                    raise PreconditionError(f"two children of {p!r} at the same direction {d}")
                seen.add(d)
                if c[q].is_free and d in corners(c[p]):
                    raise PreconditionError(f"free point {q!r} sits on a corner of E_{p}")

    @property
    def cluster(self) -> Cluster:
        return self.weighted.cluster

    @property
    def nu(self) -> Mapping[str, int]:
        return self.weighted.nu

    @property
    def ids(self) -> tuple[str, ...]:
        return self.weighted.ids

    def direction(self, q: str) -> Direction:
        """Position of q on the exceptional line of its parent."""
        c = self.cluster
        pt = c[q]
        if pt.is_free:
            return self.coords[q]
        for d, target in corners(c[pt.parent]).items():
            if target == pt.sat:
                return d
        raise InternalError(f"satellite {q!r} matches no corner")

    def with_weights(self, k: WeightedCluster) -> EmbeddedCluster:
        if k.cluster != self.cluster:
            raise PreconditionError("weights refer to a different cluster")
        return EmbeddedCluster(k, self.coords)


def corners(p: Point) -> dict[Direction, str]:
    """Directions at ``p`` lying on earlier exceptional curves, with the curve's point."""
    out: dict[Direction, str] = {}
    if p.parent is not None:
        out[INF] = p.parent
    if p.sat is not None:
        out[Fraction(0)] = p.sat
    return out


# --- tangent cones -------------------------------------------------------------

@dataclass(frozen=True)
class TangentCone:
    order: int
    rational: dict[Direction, int]           # direction -> multiplicity
    irrational: tuple[tuple[tuple, int], ...]  # (monic factor coefficients, multiplicity)


def tangent_cone(s: TruncatedSeries) -> TangentCone:
    e = s.order()
    lf = s.leading_form()
    top = max(lf)
    coeffs = [lf.get(k, Fraction(0)) for k in range(top + 1)]
    rational: dict[Direction, int] = {}
    if e - top:
        rational[INF] = e - top
    irr = []
    if top:
        poly = flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) for c in coeffs])
        _, factors = poly.factor()
        for fac, mult in factors:
            if fac.degree() == 1:
                a1, a0 = fac.coeffs()[1], fac.coeffs()[0]
                root = -a0 / a1
                rational[Fraction(int(root.p), int(root.q))] = int(mult)
            else:
                lead = fac.coeffs()[-1]
                key = tuple((c / lead) for c in fac.coeffs())
                irr.append((tuple(str(c) for c in key), int(mult)))
    return TangentCone(e, rational, tuple(irr))


# --- global reducedness checks --------------------------------------------------

def _vanishes_at_origin(p: flint.fmpq_mpoly) -> bool:
    return p.to_dict().get((0, 0), 0) == 0


def repeated_local_factor(f: TruncatedSeries) -> str | None:
    """A factor of multiplicity >= 2 through the origin, or None."""
    _, facs = f.to_flint().factor_squarefree()
    for fac, mult in facs:
        if mult >= 2 and not fac.is_constant() and _vanishes_at_origin(fac):
            return str(fac)
    return None


def common_local_factor(f: TruncatedSeries, g: TruncatedSeries) -> str | None:
    h = f.to_flint().gcd(g.to_flint())
    if h.is_constant() or not _vanishes_at_origin(h):
        return None
    return str(h)


# --- joint resolution ---------------------------------------------------------------

@dataclass
class _Node:
    point: Point
    kid: str | None
    strict: dict[int, TruncatedSeries]
    order: dict[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class Resolution:
    """Diagrams of several germs resolved together, relative to a cluster."""

    diagrams: tuple[GermCluster, ...]
    to_cluster: tuple[Matching, ...]
    precision: int | None

    def matching(self, i: int, j: int) -> Matching:
        a, b = self.diagrams[i], self.diagrams[j]
        return Matching({p: p for p in a.ids if p in b.cluster})


def _fresh_names(taken: set[str]):
    n = 0
    while True:
        n += 1
        name = f"q{n}"
        if name not in taken:
            yield name


def _walk(polys: Sequence[TruncatedSeries], k: EmbeddedCluster | None) -> list[_Node]:
    kc = k.cluster if k is not None else None
    names = _fresh_names(set(kc.ids) if kc else set())
    root_id = kc.root.id if kc else "0"
    nodes = [_Node(Point(root_id), root_id if kc else None, dict(enumerate(polys)))]
    queue = [0]
    while queue:
        node = nodes[queue.pop(0)]
        cones: dict[int, TangentCone] = {}
        for i, s in node.strict.items():
            cones[i] = tangent_cone(s)
            node.order[i] = cones[i].order
        here = corners(node.point)
        kdirs: dict[Direction, str] = {}
        if node.kid is not None:
            kdirs = {k.direction(q): q for q in kc.children(node.kid)}
        # irrational directions are only acceptable as simple, unshared exits
        seen_irr: dict[tuple, int] = {}
        for i, cone in cones.items():
            for key, mult in cone.irrational:
                if mult >= 2:
                    raise IrrationalPoint(len(key) - 1, f"point {node.point.id}")
                if key in seen_irr:
                    raise IrrationalPoint(len(key) - 1, f"common tangent at {node.point.id}")
                seen_irr[key] = i
        through: dict[Direction, list[int]] = {}
        for i, cone in cones.items():
            for d in cone.rational:
                through.setdefault(d, []).append(i)
        follow = []
        for d, idx in through.items():
            if (len(idx) >= 2 or d in here or d in kdirs
                    or any(cones[i].rational[d] >= 2 for i in idx)):
                follow.append(d)
        follow.sort(key=lambda d: (d is INF, d if d is not INF else 0))
        for d in follow:
            kid = kdirs.get(d)
            if kid is not None:
                pt = kc[kid]
                point = Point(kid, node.point.id, pt.sat)
            else:
                point = Point(next(names), node.point.id, here.get(d))
            strict = {i: node.strict[i].blow_up(d) for i in through[d]}
            nodes.append(_Node(point, kid, strict))
            queue.append(len(nodes) - 1)
            if len(nodes) > MAX_POINTS:
                raise InternalError("resolution does not terminate; is the input reduced?")
    return nodes


def _assemble(nodes: list[_Node], groups: list[list[tuple[int, int]]],
              prec: int | None) -> Resolution:
    """One diagram per group of (part, weight): effective multiplicities add up."""
    diagrams, matchings = [], []
    for group in groups:
        mine = [nd for nd in nodes if any(i in nd.strict for i, _ in group)]
        c = Cluster(tuple(nd.point for nd in mine))
        e = {nd.point.id: sum(w * nd.order.get(i, 0) for i, w in group) for nd in mine}
        diagrams.append(GermCluster(c, e))
        matchings.append(Matching({nd.point.id: nd.kid for nd in mine if nd.kid is not None}))
    return Resolution(tuple(diagrams), tuple(matchings), prec)


def _squarefree_parts(f: TruncatedSeries) -> list[tuple[TruncatedSeries, int]]:
    """f = unit * prod s_k^k near the origin, keeping the s_k through the origin."""
    _, facs = f.to_flint().factor_squarefree()
    out = []
    for fac, mult in facs:
        if not fac.is_constant() and _vanishes_at_origin(fac):
            out.append((TruncatedSeries.from_flint(fac), int(mult)))
    return out


def _default_precision(polys: Sequence[TruncatedSeries], k: EmbeddedCluster | None) -> int:
    base = sum(max(v, 0) for v in k.nu.values()) if k is not None else max(p.order() for p in polys)
    return 2 * base + 4


def resolve(polys: Sequence[TruncatedSeries], k: EmbeddedCluster | None = None,
            dmax: int = 512, allow_multiple: bool = False) -> Resolution:
    """Resolve the germs jointly, following every point of ``k`` they pass.

    Each germ's diagram contains the points where its strict transform is
    singular, tangent to an exceptional curve, shared with another germ, or
    a point of ``k``.  Exact polynomials are truncated to a working
    precision that is raised until every decision is certified.

    With ``allow_multiple`` an exact germ with repeated components is
    resolved through its squarefree parts and its diagram carries the
    multiplicities of the components.
    """
    polys = list(polys)
    for p in polys:
        if p.is_zero():
            raise PreconditionError("cannot resolve the zero germ")
        if p.value_at_origin():
            raise PreconditionError(f"germ {p} does not pass through the origin")
    exact = all(p.exact for p in polys)
    groups = [[(i, 1)] for i in range(len(polys))]
    if exact:
        for p in polys:
            bad = repeated_local_factor(p)
            if bad is not None and not allow_multiple:
                raise PreconditionError(f"germ is not reduced: ({bad})^2 divides it")
        for a in range(len(polys)):
            for b in range(a + 1, len(polys)):
                common = common_local_factor(polys[a], polys[b])
                if common is not None:
                    raise NonFiniteIntersection(f"common component {common} through the origin")
        if allow_multiple:
            parts, groups = [], []
            for p in polys:
                group = []
                for s, mult in _squarefree_parts(p):
                    group.append((len(parts), mult))
                    parts.append(s)
                groups.append(group)
            polys = parts
        prec = _default_precision(polys, k)
        while True:
            try:
                nodes = _walk([p.truncate(prec) for p in polys], k)
                return _assemble(nodes, groups, prec)
            except InsufficientPrecision:
                if prec >= dmax:
                    raise
                prec = min(2 * prec, dmax)
    nodes = _walk(polys, k)
    return _assemble(nodes, groups, min(p.prec for p in polys if p.prec is not None))


def multiplicity_sequence(f: TruncatedSeries, dmax: int = 512) -> GermCluster:
    """Enriques diagram of the germ f = 0."""
    return resolve([f], None, dmax).diagrams[0]


def diagram_in(f: TruncatedSeries, k: EmbeddedCluster, dmax: int = 512) -> tuple[GermCluster, Matching]:
    """Diagram of f extended through the points of K it passes, with its matching onto K."""
    r = resolve([f], k, dmax)
    return r.diagrams[0], r.to_cluster[0]


# --- virtual transforms and I_K ---------------------------------------------------

def _needed_precision(k: EmbeddedCluster) -> dict[str, int]:
    c = k.cluster
    need: dict[str, int] = {}
    for p in reversed(c.ids):
        nu = k.nu[p]
        kids = [need[q] + nu for q in c.children(p)]
        need[p] = max([max(nu, 0), 0] + kids)
    return need


@dataclass(frozen=True)
class Membership:
    member: bool
    virtual: dict[str, int | None]   # order of the virtual transform, None if not reached
    certified: dict[str, bool]       # False when only a lower bound (the truncation) is known
    certified_precision: int | None


def virtual_multiplicity_check(f: TruncatedSeries, k: EmbeddedCluster) -> Membership:
    """Whether f goes virtually through K, i.e. f is in I_K."""
    need = _needed_precision(k)
    c = k.cluster
    root = c.root.id
    work = f.truncate(need[root] + 1) if f.exact else f
    trans: dict[str, TruncatedSeries] = {root: work}
    virt: dict[str, int | None] = {p: None for p in c.ids}
    cert: dict[str, bool] = {p: False for p in c.ids}
    ok = True
    for p in c.ids:
        pt = c[p]
        if pt.parent is not None:
            if pt.parent not in trans:
                continue
            trans[p] = trans[pt.parent].virtual_transform(k.direction(p), k.nu[pt.parent])
        s = trans[p]
        if s.is_zero():
            virt[p] = s.prec if s.prec is not None else None
            cert[p] = s.prec is None
        else:
            virt[p] = s.order()
            cert[p] = True
        if not s.order_at_least(k.nu[p]):
            ok = False
            del trans[p]
            break
    return Membership(ok, virt, cert, work.prec)


def values_of_m(c: Cluster) -> dict[str, int]:
    return cl.values(WeightedCluster(c, {c.root.id: 1}))


def stability_degree(k: EmbeddedCluster | WeightedCluster) -> int:
    """Least d with m^d inside I_K."""
    w = k.weighted if isinstance(k, EmbeddedCluster) else k
    w = cl.unload(w) if not cl.is_consistent(w) else w
    v, vm = cl.values(w), values_of_m(w.cluster)
    return max(0, max(-(-v[p] // vm[p]) for p in w.ids))


def _monomials(n: int) -> list[tuple[int, int]]:
    return [(i, d - i) for d in range(n) for i in range(d, -1, -1)]


def _q(v: Fraction) -> flint.fmpq:
    return flint.fmpq(v.numerator, v.denominator)


def _chart_map(src: list[tuple[int, int]], dst_index: dict[tuple[int, int], int],
               d: Direction, nu: int) -> flint.fmpq_mat:
    m = flint.fmpq_mat(len(src), len(dst_index))
    for r, (i, j) in enumerate(src):
        if i + j < nu:
            continue  # such coefficients vanish once the condition at the parent holds
        img = TruncatedSeries({(i, j): 1}).virtual_transform(d, nu)
        for mon, v in img.coeffs.items():
            col = dst_index.get(mon)
            if col is not None:
                m[r, col] = _q(v)
    return m


def _left_kernel(c: flint.fmpq_mat) -> flint.fmpq_mat:
    r, n = c.nrows(), c.ncols()
    aug = flint.fmpq_mat(r, n + r)
    for i in range(r):
        for j in range(n):
            aug[i, j] = c[i, j]
        aug[i, n + i] = 1
    red, rank = aug.rref()
    # with the C-block first, rows past its rank have a zero C-part
    rows = []
    for i in range(r):
        if all(red[i, j] == 0 for j in range(n)):
            rows.append([red[i, n + t] for t in range(r)])
    out = flint.fmpq_mat(len(rows), r)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            out[i, j] = v
    return out


@dataclass(frozen=True)
class IdealBasis:
    basis: tuple[TruncatedSeries, ...]
    degree_bound: int
    codim: int
    stable: bool
    threshold: int   # least D for which the codimension equals dim O/I_K

    def rref_key(self) -> tuple:
        return tuple(tuple(sorted(b.coeffs.items())) for b in self.basis)


def ideal_basis(k: EmbeddedCluster, degree_bound: int) -> IdealBasis:
    """Reduced echelon basis of I_K intersected with polynomials of degree < D."""
    D = degree_bound
    c = k.cluster
    need = _needed_precision(k)
    mons = _monomials(D)
    nb = len(mons)
    basis = flint.fmpq_mat(nb, nb)
    for i in range(nb):
        basis[i, i] = 1
    trans: dict[str, tuple[list[tuple[int, int]], flint.fmpq_mat]] = {}
    for p in c.ids:
        pt = c[p]
        tgt = _monomials(need[p])
        tidx = {m: i for i, m in enumerate(tgt)}
        if pt.parent is None:
            t = flint.fmpq_mat(nb, len(tgt))
            for r, m in enumerate(mons):
                if m in tidx:
                    t[r, tidx[m]] = 1
        else:
            src, tpar = trans[pt.parent]
            t = tpar * _chart_map(src, tidx, k.direction(p), k.nu[pt.parent])
        low = [tidx[m] for m in tgt if m[0] + m[1] < k.nu[p]]
        if low and basis.nrows():
            cond = flint.fmpq_mat(t.nrows(), len(low))
            for r in range(t.nrows()):
                for j, col in enumerate(low):
                    cond[r, j] = t[r, col]
            lam = _left_kernel(cond)
            basis = lam * basis
            t = lam * t
            trans = {q: (s, lam * m) for q, (s, m) in trans.items()}
        trans[p] = (tgt, t)
    red, rank = basis.rref() if basis.nrows() else (basis, 0)
    polys = []
    for r in range(rank):
        terms = {}
        for j, m in enumerate(mons):
            v = red[r, j]
            if v != 0:
                terms[m] = Fraction(int(v.p), int(v.q))
        polys.append(TruncatedSeries(terms))
    codim = nb - rank
    threshold = stability_degree(k)
    stable = D >= threshold
    if stable:
        w = cl.unload(k.weighted) if not cl.is_consistent(k.weighted) else k.weighted
        expected = cl.colength_cluster(w)
        if codim != expected:
            raise InternalError(f"stable codimension {codim} != colength {expected}")
    return IdealBasis(tuple(polys), D, codim, stable, threshold)


def random_member(k: EmbeddedCluster, degree_bound: int | None = None, seed: int = 0,
                  box: int = 9) -> TruncatedSeries:
    """Random integer combination of the ideal basis, coefficients nonzero in [-box, box]."""
    D = degree_bound if degree_bound is not None else max(stability_degree(k), 1) + 1
    b = ideal_basis(k, D)
    return _combine(b.basis, random.Random(seed), box)


def _combine(basis: Sequence[TruncatedSeries], rng: random.Random, box: int) -> TruncatedSeries:
    while True:
        out = TruncatedSeries()
        for poly in basis:
            out = out + poly * (rng.randint(1, box) * rng.choice((-1, 1)))
        if not out.is_zero():
            return out


def random_embedding(k: WeightedCluster, seed: int, box: int = 3) -> EmbeddedCluster:
    """Seeded rational positions (small integers or INF at the root) for the free points."""
    rng = random.Random(seed)
    c = k.cluster
    coords: dict[str, Direction] = {}
    for p in c.ids:
        taken = set(corners(c[p]))
        for q in c.children(p):
            if not c[q].is_free:
                continue
            choices: list[Direction] = [Fraction(v) for v in range(-box, box + 1)]
            if c[p].is_root:
                choices.append(INF)
            choices = [d for d in choices if d not in taken]
            d = rng.choice(choices)
            taken.add(d)
            coords[q] = d
    return EmbeddedCluster(k, coords)
