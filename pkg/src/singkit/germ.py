"""Plane curve germs encoded by their Enriques diagrams.

A :class:`GermCluster` lists the infinitely near points a curve germ goes
through (its singular points, plus any non-singular points the caller needs
for comparisons) with the effective multiplicity of the germ at each.
Nothing here knows coordinates: when two diagrams or a diagram and a
cluster have to be compared, the caller says which points coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import cluster as cl
from .cluster import Cluster, WeightedCluster
from .errors import InternalError, NonFiniteIntersection, PreconditionError


@dataclass(frozen=True)
class GermCluster:
    cluster: Cluster
    e: Mapping[str, int]

    def __post_init__(self) -> None:
        e = {p: int(self.e[p]) for p in self.cluster.ids}
        for p, m in e.items():
            if m < 1:
                raise PreconditionError(f"effective multiplicity at {p!r} must be positive")
        c = self.cluster
        for p in c.ids:
            if e[p] < sum(e[q] for q in c.proximate_points(p)):
                raise PreconditionError(f"proximity inequality fails at {p!r}")
        object.__setattr__(self, "e", e)

    @classmethod
    def build(cls, rows) -> GermCluster:
        k = WeightedCluster.build(rows)
        return cls(k.cluster, k.nu)

    @property
    def ids(self) -> tuple[str, ...]:
        return self.cluster.ids

    def excesses(self) -> dict[str, int]:
        return cl.excesses(WeightedCluster(self.cluster, self.e))


@dataclass(frozen=True)
class Matching:
    """Which points of one diagram coincide with points of another.

    ``common_branches`` counts branches the two germs share beyond the last
    matched point; a positive value makes their intersection infinite.
    """

    pairs: Mapping[str, str] = field(default_factory=dict)
    common_branches: int = 0

    def inverse(self) -> Matching:
        return Matching({v: k for k, v in self.pairs.items()}, self.common_branches)


def _as_matching(shared) -> Matching:
    if isinstance(shared, Matching):
        return shared
    return Matching(dict(shared or {}))


def _check_matching(a: Cluster, b: Cluster, m: Matching) -> None:
    if len(set(m.pairs.values())) != len(m.pairs):
        raise PreconditionError("matching is not injective")
    for p, q in m.pairs.items():
        if p not in a or q not in b:
            raise PreconditionError(f"matching pair {p}={q} references unknown points")
        pa, pb = a[p], b[q]
        if pa.parent is None or pb.parent is None:
            if not (pa.parent is None and pb.parent is None):
                raise PreconditionError("the origin can only match the origin")
            continue
        if m.pairs.get(pa.parent) != pb.parent:
            raise PreconditionError(f"matching is not prefix-closed at {p}={q}")
        if (pa.sat is None) != (pb.sat is None) or (
                pa.sat is not None and m.pairs.get(pa.sat) != pb.sat):
            raise PreconditionError(f"matching does not respect proximity at {p}={q}")
    if m.pairs and a.root.id not in m.pairs:
        raise PreconditionError("a nonempty matching must contain the origin")


def branch_count(c: GermCluster) -> int:
    r = sum(c.excesses().values())
    if r < 1:
        raise InternalError("diagram has no branches")
    return r


def delta_invariant(c: GermCluster) -> int:
    return sum(m * (m - 1) // 2 for m in c.e.values())


def milnor(c: GermCluster) -> int:
    """mu = 2 delta - r + 1"""
    mu = 2 * delta_invariant(c) - branch_count(c) + 1
    if mu < 0:
        raise InternalError("negative Milnor number")
    return mu


def noether_intersection(a: GermCluster, b: GermCluster, shared) -> int:
    """Intersection multiplicity at the origin by Noether's formula.

    ``shared`` maps points of ``a`` to the coinciding points of ``b``; every
    common infinitely near point must be listed.
    """
    m = _as_matching(shared)
    _check_matching(a.cluster, b.cluster, m)
    if m.common_branches:
        raise NonFiniteIntersection("the germs share a branch")
    return sum(a.e[p] * b.e[q] for p, q in m.pairs.items())


def values_of_germ(f: GermCluster, k: WeightedCluster, shared) -> dict[str, int]:
    """Orders of f along the exceptional curves of the points of K."""
    m = _as_matching(shared)
    _check_matching(f.cluster, k.cluster, m)
    inv = {q: p for p, q in m.pairs.items()}
    eff = {q: (f.e[inv[q]] if q in inv else 0) for q in k.ids}
    return cl.values(WeightedCluster(k.cluster, eff))


def _effective_on(f: GermCluster, k: WeightedCluster, m: Matching) -> dict[str, int]:
    inv = {q: p for p, q in m.pairs.items()}
    return {q: (f.e[inv[q]] if q in inv else 0) for q in k.ids}


def is_member(f: GermCluster, k: WeightedCluster, shared) -> bool:
    v, vk = values_of_germ(f, k, shared), cl.values(k)
    return all(v[p] >= vk[p] for p in k.ids)


def is_v_superficial(f: GermCluster, k: WeightedCluster, shared) -> bool:
    """f has the generic value of I_K along every exceptional component of
    the normalized blow-up, i.e. on every point of K with positive excess.

    Components with excess 0 are contracted by the normalized blow-up and do
    not take part in the condition.
    """
    if not cl.is_consistent(k):
        k = cl.unload(k)
    v, vk = values_of_germ(f, k, shared), cl.values(k)
    rho = cl.excesses(k)
    return all(v[p] == vk[p] for p in k.ids if rho[p] > 0)


def goes_sharply_through(f: GermCluster, k: WeightedCluster, shared) -> bool:
    """f has effective multiplicity nu_p at every point of K with nu_p > 0,
    and nothing but free simple points elsewhere.

    Points of K with nu_p = 0 are treated as outside K.
    """
    cl._require_consistent(k)
    m = _as_matching(shared)
    _check_matching(f.cluster, k.cluster, m)
    eff = _effective_on(f, k, m)
    if any(eff[p] != k.nu[p] for p in k.ids if k.nu[p] > 0):
        return False
    inside = {p for p, q in m.pairs.items() if k.nu[q] > 0}
    for p in f.ids:
        if p not in inside and (f.e[p] != 1 or not f.cluster[p].is_free):
            return False
    return True


class TheoremViolation(AssertionError):
    """The equivalence between sharp passage and minimal Milnor number failed."""


def is_general(f: GermCluster, k: WeightedCluster, shared) -> bool:
    """General element test; checks it against the Milnor-number characterization."""
    sharp = goes_sharply_through(f, k, shared)
    mu, mu_k = milnor(f), cl.generic_milnor_cluster(k)
    if sharp and mu != mu_k:
        raise TheoremViolation(f"sharp germ with mu={mu} != mu_I={mu_k}")
    if not sharp and is_member(f, k, shared) and mu <= mu_k:
        raise TheoremViolation(f"non-sharp member with mu={mu} <= mu_I={mu_k}")
    return sharp


def _signature(c: Cluster, e: Mapping[str, int], p: str) -> tuple:
    pt = c[p]
    if pt.sat is None:
        kind: tuple = ("free",)
    else:
        # the satellite target is an ancestor; record how far up it sits
        kind = ("sat", c.depth(p) - c.depth(pt.sat))
    kids = sorted(_signature(c, e, q) for q in c.children(p))
    return (e[p], kind, tuple(kids))


def _essential(g: GermCluster) -> GermCluster:
    """Drop free simple points carrying no satellite descendants."""
    c = g.cluster
    keep: set[str] = set()
    for p in reversed(c.ids):
        pt = c[p]
        if pt.is_root or g.e[p] > 1 or not pt.is_free or any(q in keep for q in c.children(p)):
            keep.add(p)
    sub = c.restrict(keep)
    return GermCluster(sub, {p: g.e[p] for p in sub.ids})


def canonical_form(g: GermCluster) -> tuple:
    g = _essential(g)
    return _signature(g.cluster, g.e, g.cluster.root.id)


def equisingular(a: GermCluster, b: GermCluster) -> bool:
    return canonical_form(a) == canonical_form(b)


def generic_member_diagram(k: WeightedCluster) -> GermCluster:
    cl._require_consistent(k)
    keep = [p for p in k.ids if k.nu[p] > 0]
    sub = k.cluster.restrict(keep)
    return GermCluster(sub, {p: k.nu[p] for p in sub.ids})


def identity_matching(f: GermCluster, k: WeightedCluster) -> Matching:
    return Matching({p: p for p in f.ids if p in k.cluster})


def _contracted_components(k: WeightedCluster) -> dict[str, int]:
    """Label each excess-0 point by its connected component in the dual graph."""
    rho = cl.excesses(k)
    g, _ = cl.to_resolution_graph(k)
    contracted = {p for p in k.ids if rho[p] == 0}
    adj: dict[str, set[str]] = {p: set() for p in contracted}
    for a, b in g.edges:
        if a in contracted and b in contracted:
            adj[a].add(b)
            adj[b].add(a)
    label: dict[str, int] = {}
    for p in k.ids:
        if p in contracted and p not in label:
            stack, label[p] = [p], len(set(label.values()))
            n = label[p]
            while stack:
                for w in adj[stack.pop()]:
                    if w not in label:
                        label[w] = n
                        stack.append(w)
    return label


def _meeting_locations(f: GermCluster, k: WeightedCluster, to_k: Matching,
                       rename: Mapping[str, str], tag: str) -> set:
    """Where the strict transform of f meets the exceptional divisor of the
    normalized blow-up of I_K."""
    comp = _contracted_components(k)
    c = f.cluster
    inv = {q: p for p, q in to_k.pairs.items()}
    eff = _effective_on(f, k, to_k)
    locs: set = set()
    outside = [p for p in f.ids if p not in to_k.pairs]
    for q in k.ids:
        if eff[q] == 0:
            continue
        rho_q = eff[q] - sum(eff[r] for r in k.cluster.proximate_points(q))
        on_q = [w for w in outside if inv[q] in c.proximate_to(w)]
        exits = [w for w in on_q if c[w].parent in to_k.pairs]
        for w in exits:
            hit = [comp[to_k.pairs[s]] for s in c.proximate_to(w) if to_k.pairs[s] in comp]
            locs.add(("component", hit[0]) if hit else ("point", rename.get(w, (tag, w))))
        if rho_q - sum(f.e[w] for w in on_q) > 0:
            locs.add(("component", comp[q]) if q in comp else ("free", tag, q))
    return locs


@dataclass(frozen=True)
class ReductionReport:
    rees: bool
    e_j: int
    e_i: int
    f_superficial: bool
    g_superficial: bool
    separated: bool

    @property
    def good_pair(self) -> bool:
        return self.f_superficial and self.g_superficial and self.separated


def is_reduction_pair(f: GermCluster, g: GermCluster, k: WeightedCluster,
                      f_to_k, g_to_k, f_to_g) -> ReductionReport:
    """Decide whether (f, g) generates a reduction of I_K.

    The verdict is Rees' criterion e(f, g) = e(I_K).  The report also carries
    the geometric decomposition: v-superficiality of each element and
    whether their strict transforms have no common point on the exceptional
    divisor of the normalized blow-up.
    """
    cl._require_consistent(k)
    fk, gk, fg = _as_matching(f_to_k), _as_matching(g_to_k), _as_matching(f_to_g)
    for h, m in ((f, fk), (g, gk)):
        if not is_member(h, k, m):
            raise PreconditionError("both elements must belong to I_K")
    e_j = noether_intersection(f, g, fg)
    e_i = cl.multiplicity_cluster(k)
    g_names = {q: p for p, q in fg.pairs.items()}
    f_names = {p: p for p in f.ids}
    sep = not (_meeting_locations(f, k, fk, f_names, "f")
               & _meeting_locations(g, k, gk, g_names, "g"))
    return ReductionReport(
        rees=e_j == e_i, e_j=e_j, e_i=e_i,
        f_superficial=is_v_superficial(f, k, fk),
        g_superficial=is_v_superficial(g, k, gk),
        separated=sep,
    )
