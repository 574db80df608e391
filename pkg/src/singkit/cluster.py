"""Weighted clusters of infinitely near points of a smooth surface germ.

Each point other than the origin has a parent (the point it was obtained
from by one blow-up) and optionally a second point it is proximate to, in
which case it is *satellite*.  Virtual multiplicities may have any sign;
a cluster whose excesses and multiplicities are all non-negative is
consistent and corresponds to a complete m-primary ideal.

In cycle language a weighted cluster is the divisor ``Z = sum nu_p Ebar_p``
(``Ebar_p`` the total transform of the exceptional curve of ``p``).  Then
``Z . E_p = -rho_p``, the values are the coefficients of ``Z`` on the
strict transforms, and unloading is Laufer's loop ``Z += E_p``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import resgraph
from .errors import InternalError, PreconditionError
from .resgraph import Cycle, ResolutionGraph


@dataclass(frozen=True)
class Point:
    id: str
    parent: str | None = None
    sat: str | None = None

    @property
    def is_root(self) -> bool:
        return self.parent is None

    @property
    def is_free(self) -> bool:
        return self.sat is None


@dataclass(frozen=True)
class Cluster:
    """Points in blow-up order; the first point is the origin."""

    points: tuple[Point, ...]
    _by_id: dict[str, Point] = field(init=False, repr=False, compare=False)
    _prox: dict[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise PreconditionError("a cluster needs at least its origin")
        if not pts[0].is_root or pts[0].sat is not None:
            raise PreconditionError("the first point must be the origin")
        by_id: dict[str, Point] = {}
        prox: dict[str, tuple[str, ...]] = {}
        used_sat: set[tuple[str, str]] = set()
        for p in pts:
            if p.id in by_id:
                raise PreconditionError(f"duplicate point id {p.id!r}")
            if p is not pts[0]:
                if p.parent is None:
                    raise PreconditionError(f"point {p.id!r} has no parent; only one origin allowed")
                if p.parent not in by_id:
                    raise PreconditionError(f"parent of {p.id!r} must precede it")
                if p.sat is not None:
                    if p.sat not in prox[p.parent]:
                        raise PreconditionError(
                            f"{p.id!r} cannot be proximate to {p.sat!r}: "
                            f"its parent {p.parent!r} is not proximate to it")
                    if (p.parent, p.sat) in used_sat:
                        raise PreconditionError(
                            f"two points on the intersection of E_{p.parent} and E_{p.sat}")
                    used_sat.add((p.parent, p.sat))
            by_id[p.id] = p
            prox[p.id] = tuple(x for x in (p.parent, p.sat) if x is not None)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_prox", prox)

    @classmethod
    def build(cls, rows: Iterable[tuple]) -> Cluster:
        """Cluster from tuples ``(id,)``, ``(id, parent)`` or ``(id, parent, sat)``."""
        return cls(tuple(Point(*map(lambda s: None if s is None else str(s), t)) for t in rows))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.points)

    @property
    def root(self) -> Point:
        return self.points[0]

    def __getitem__(self, pid: str) -> Point:
        return self._by_id[pid]

    def __contains__(self, pid: object) -> bool:
        return pid in self._by_id

    def __len__(self) -> int:
        return len(self.points)

    def proximate_to(self, q: str) -> tuple[str, ...]:
        """The points q is proximate to (its parent, and its satellite target)."""
        return self._prox[q]

    def proximate_points(self, p: str) -> tuple[str, ...]:
        """The points of the cluster proximate to p."""
        return tuple(q for q in self.ids if p in self._prox[q])

    def children(self, p: str) -> tuple[str, ...]:
        return tuple(q.id for q in self.points if q.parent == p)

    def depth(self, p: str) -> int:
        d = 0
        while self._by_id[p].parent is not None:
            p = self._by_id[p].parent
            d += 1
        return d

    def restrict(self, keep: Iterable[str]) -> Cluster:
        keep = set(keep)
        return Cluster(tuple(p for p in self.points if p.id in keep))


@dataclass(frozen=True)
class WeightedCluster:
    cluster: Cluster
    nu: Mapping[str, int]

    def __post_init__(self) -> None:
        nu = {pid: int(self.nu.get(pid, 0)) for pid in self.cluster.ids}
        extra = set(self.nu) - set(nu)
        if extra:
            raise PreconditionError(f"multiplicities given for unknown points {sorted(extra)}")
        object.__setattr__(self, "nu", nu)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedCluster):
            return NotImplemented
        return self.cluster == other.cluster and self.nu == other.nu

    def __hash__(self) -> int:
        return hash((self.cluster, tuple(sorted(self.nu.items()))))

    @classmethod
    def build(cls, rows: Iterable[tuple]) -> WeightedCluster:
        """From tuples ``(id, parent, sat, nu)``; parent/sat may be None."""
        pts, nu = [], {}
        for pid, parent, sat, m in rows:
            pts.append((pid, parent, sat))
            nu[str(pid)] = m
        return cls(Cluster.build(pts), nu)

    @property
    def ids(self) -> tuple[str, ...]:
        return self.cluster.ids

    def with_nu(self, nu: Mapping[str, int]) -> WeightedCluster:
        return WeightedCluster(self.cluster, nu)


def excesses(k: WeightedCluster) -> dict[str, int]:
    c = k.cluster
    return {p: k.nu[p] - sum(k.nu[q] for q in c.proximate_points(p)) for p in c.ids}


def is_consistent(k: WeightedCluster) -> bool:
    return all(v >= 0 for v in k.nu.values()) and all(r >= 0 for r in excesses(k).values())


def values(k: WeightedCluster) -> dict[str, int]:
    """v_p = nu_p + sum of v_q over the points q that p is proximate to."""
    v: dict[str, int] = {}
    for p in k.ids:
        v[p] = k.nu[p] + sum(v[q] for q in k.cluster.proximate_to(p))
    return v


def _unload_bound(k: WeightedCluster) -> int:
    # Z <= M * Z_m with Z_m the (antinef) cycle of the maximal ideal
    vm = values(WeightedCluster(k.cluster, {k.cluster.root.id: 1}))
    vk = values(k)
    m = max(max(vk.values()), 0)
    return sum(m * vm[p] - vk[p] for p in k.ids) + 1


def unload(k: WeightedCluster, policy: str = "first") -> WeightedCluster:
    """Tame unloading to the consistent cluster defining the same complete ideal.

    While some excess ``rho_p`` is negative, add ``E_p`` to the cycle: ``nu_p``
    goes up by one and ``nu_q`` down by one for each ``q`` proximate to ``p``.
    ``policy`` ("first" or "last") picks which offending point is unloaded;
    the result does not depend on it.
    """
    if policy not in ("first", "last"):
        raise ValueError(f"unknown pivot policy {policy!r}")
    c = k.cluster
    prox_pts = {p: c.proximate_points(p) for p in c.ids}
    nu = dict(k.nu)
    bound = _unload_bound(k)
    steps = 0
    while True:
        bad = [p for p in c.ids if nu[p] - sum(nu[q] for q in prox_pts[p]) < 0]
        if not bad:
            break
        p = bad[0] if policy == "first" else bad[-1]
        nu[p] += 1
        for q in prox_pts[p]:
            nu[q] -= 1
        steps += 1
        if steps > bound:
            raise InternalError("unloading did not terminate within its bound")
    out = WeightedCluster(c, nu)
    if not any(nu.values()):
        raise PreconditionError("cluster unloads to the unit ideal (no positive multiplicity)")
    if not is_consistent(out):
        raise InternalError("unloaded cluster is not consistent")
    return out


def _require_consistent(k: WeightedCluster) -> None:
    if not is_consistent(k):
        raise PreconditionError("cluster is not consistent; unload it first")
    if not any(k.nu.values()):
        raise PreconditionError("cluster has no positive multiplicity")


def ideal_cycle(k: WeightedCluster) -> Cycle:
    return Cycle(values(k))


def to_resolution_graph(k: WeightedCluster) -> tuple[ResolutionGraph, Cycle]:
    """Dual graph of the blow-up of every point of K, and Z_I on it."""
    _require_consistent(k)
    c = k.cluster
    verts = []
    for p in c.ids:
        verts.append((p, -1 - len(c.proximate_points(p)), 0))
    edges = []
    for q in c.ids:
        for p in c.proximate_to(q):
            both = any(p in c.proximate_to(r) and q in c.proximate_to(r) for r in c.ids)
            if not both:
                edges.append((p, q))
    g = ResolutionGraph(tuple(verts), tuple(edges))
    z = ideal_cycle(k)
    if abs(g.determinant()) != 1:
        raise InternalError("cluster graph is not unimodular")
    return g, z


def multiplicity_cluster(k: WeightedCluster) -> int:
    """e(I_K) = sum of nu_p^2."""
    _require_consistent(k)
    e = sum(n * n for n in k.nu.values())
    g, z = to_resolution_graph(k)
    if resgraph.multiplicity_from_cycle(g, z) != e:
        raise InternalError("sum of nu^2 disagrees with -Z^2")
    return e


def generic_milnor_cluster(k: WeightedCluster) -> int:
    """mu_I = sum nu(nu-1) - sum rho + 1, checked against the cycle formula."""
    _require_consistent(k)
    mu = sum(n * (n - 1) for n in k.nu.values()) - sum(excesses(k).values()) + 1
    g, z = to_resolution_graph(k)
    if resgraph.generic_milnor(g, z) != mu:
        raise InternalError("combinatorial mu_I disagrees with the resolution-graph formula")
    return mu


def colength_cluster(k: WeightedCluster) -> int:
    """dim O/I_K = sum nu(nu+1)/2 for a consistent cluster."""
    _require_consistent(k)
    return sum(n * (n + 1) // 2 for n in k.nu.values())


def prune(k: WeightedCluster) -> WeightedCluster:
    """Drop points of multiplicity 0 whose whole subtree has multiplicity 0."""
    c = k.cluster
    alive: set[str] = set()
    for p in reversed(c.ids):
        if k.nu[p] != 0 or any(q in alive for q in c.children(p)):
            alive.add(p)
    alive.add(c.root.id)
    sub = c.restrict(alive)
    return WeightedCluster(sub, {p: k.nu[p] for p in sub.ids})


def same_complete_ideal(k1: WeightedCluster, k2: WeightedCluster) -> bool:
    return prune(unload(k1)) == prune(unload(k2))


def _satellite_targets(c_points: list[Point], parent: Point, used: set[tuple[str, str]]) -> list[str]:
    return [s for s in (parent.parent, parent.sat) if s is not None and (parent.id, s) not in used]


def random_consistent_cluster(max_points: int, max_mult: int, seed: int,
                              satellite_rate: float = 0.35) -> WeightedCluster:
    """Seeded random consistent cluster with 1..max_points points and
    multiplicities in 1..max_mult."""
    if max_points < 1 or max_mult < 1:
        raise ValueError("max_points and max_mult must be positive")
    rng = random.Random(seed)
    while True:
        n = rng.randint(1, max_points)
        pts = [Point("0")]
        used: set[tuple[str, str]] = set()
        for i in range(1, n):
            parent = rng.choice(pts)
            targets = _satellite_targets(pts, parent, used)
            sat = None
            if targets and rng.random() < satellite_rate:
                sat = rng.choice(targets)
                used.add((parent.id, sat))
            pts.append(Point(str(i), parent.id, sat))
        c = Cluster(tuple(pts))
        nu: dict[str, int] = {}
        ok = True
        for p in reversed(c.ids):
            low = max(1, sum(nu[q] for q in c.proximate_points(p)))
            if low > max_mult:
                ok = False
                break
            nu[p] = rng.randint(low, max_mult)
        if ok:
            k = WeightedCluster(c, nu)
            assert is_consistent(k)
            return k
