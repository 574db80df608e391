"""Seeded cross-module verification suites and the corpora they run on.

Every suite takes a seed and a sample count, runs each sample
independently and reports one line per sample in sample order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import cluster as cl
from . import germ, resgraph
from .cluster import Cluster, Point, WeightedCluster
from .errors import NonFiniteIntersection, OracleRefusal, PreconditionError
from .series import discriminant as disc
from .series.colength import jacobian_colength, pair_colength
from .series.resolve import (EmbeddedCluster, _combine, corners, diagram_in, ideal_basis,
                             random_embedding, resolve, stability_degree)
from .series.truncated import TruncatedSeries, polynomial


@dataclass
class SuiteResult:
    name: str
    lines: list[str] = field(default_factory=list)
    failures: int = 0
    skipped: int = 0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, index: int, ok: bool | None, detail: str) -> None:
        tag = "skip" if ok is None else "ok" if ok else "FAIL"
        if ok is None:
            self.skipped += 1
        elif not ok:
            self.failures += 1
        self.lines.append(f"[{index:03d}] {tag} {detail}")


# --- corpora -----------------------------------------------------------------------

def member_of(k: EmbeddedCluster, rng: random.Random, box: int = 9) -> TruncatedSeries:
    w = k.weighted if cl.is_consistent(k.weighted) else cl.unload(k.weighted)
    d = max(stability_degree(w), 1) + 1
    return _combine(ideal_basis(k, d).basis, rng, box)


def inconsistent_cluster(seed: int, max_points: int = 5, max_mult: int = 3) -> EmbeddedCluster | None:
    """Random embedded cluster with some negative excess, or None if the draw is unusable."""
    rng = random.Random(seed)
    base = cl.random_consistent_cluster(max_points, max_mult, seed)
    nu = {p: rng.randint(-1, max_mult) for p in base.ids}
    k = WeightedCluster(base.cluster, nu)
    if cl.is_consistent(k):
        return None
    try:
        cl.unload(k)
    except PreconditionError:
        return None
    return random_embedding(k, seed)


def unloading_corpus(n: int, seed: int = 0) -> list[EmbeddedCluster]:
    out: list[EmbeddedCluster] = []
    s = seed
    while len(out) < n:
        k = inconsistent_cluster(s)
        if k is not None:
            out.append(k)
        s += 1
    return out


def smaller_ideal(k: EmbeddedCluster, rng: random.Random) -> EmbeddedCluster:
    """A cluster whose ideal lies inside I_K: one multiplicity raised or a free point added."""
    c, nu = k.cluster, dict(k.nu)
    p = rng.choice(c.ids)
    if rng.random() < 0.5:
        nu[p] += 1
        w = WeightedCluster(c, nu)
        return EmbeddedCluster(cl.unload(w) if not cl.is_consistent(w) else w, k.coords)
    name = f"n{len(c)}"
    taken = set(corners(c[p])) | {k.direction(q) for q in c.children(p)}
    d = next(Fraction(v) for v in range(-len(c) - 3, len(c) + 4) if Fraction(v) not in taken)
    nu[name] = 1
    w = WeightedCluster(Cluster(c.points + (Point(name, p, None),)), nu)
    w = cl.unload(w) if not cl.is_consistent(w) else w
    return EmbeddedCluster(w, {**k.coords, name: d})


@dataclass(frozen=True)
class ReductionCase:
    k: EmbeddedCluster
    f: TruncatedSeries
    g: TruncatedSeries


def reduction_case(seed: int) -> ReductionCase:
    """Two elements of I_K, each generic or drawn from a smaller ideal."""
    rng = random.Random(seed)
    w = cl.random_consistent_cluster(4, 3, seed)
    k = random_embedding(w, seed)
    pair = []
    for _ in range(2):
        src = k if rng.random() < 0.6 else smaller_ideal(k, rng)
        pair.append(member_of(src, rng))
    f, g = pair
    if rng.random() < 0.15:
        # g agrees with f far along its branches
        g = f + member_of(k, rng) * TruncatedSeries({(4, 0): 1})
    return ReductionCase(k, f, g)


@dataclass(frozen=True)
class ReductionOutcome:
    report: germ.ReductionReport
    e_j_colength: int

    @property
    def consistent(self) -> bool:
        return (self.report.good_pair == self.report.rees
                and self.report.e_j == self.e_j_colength)


def reduction_outcome(case: ReductionCase) -> ReductionOutcome:
    r = resolve([case.f, case.g], case.k)
    df, dg = r.diagrams
    mf, mg = r.to_cluster
    rep = germ.is_reduction_pair(df, dg, case.k.weighted, mf, mg, r.matching(0, 1))
    return ReductionOutcome(rep, pair_colength(case.f, case.g).value)


GERM_CORPUS: tuple[str, ...] = (
    "x", "x*y", "y^2 - x^3", "y^2 - x^4", "y^2 - x^5", "y^3 - x^4", "y^3 - x^5",
    "x^3 - y^3", "x*y*(x - y)", "(y^2 - x^3)*(y^2 + x^3)", "x^2*y + y^4", "(y - x^2)*(y + x^2)",
    "y^4 - x^6", "y^2 - x^2 - x^3", "(y^2 - x^3)*(x^2 - y^3)", "x^4 - y^4 + x^5",
    "(y - x^2)*(y - 2*x^2)*(y + x^3)",
)


def projection_corpus(n: int, seed: int = 0) -> list[disc.ProjectionPair]:
    """Maps (linear form, polynomial) with rational coefficients for elimination checks."""
    base = [("x", "y"), ("x", "y^2"), ("x", "y^3"), ("y", "x^3 + x*y"), ("x + y", "x*y + y^3")]
    out = [disc.ProjectionPair(polynomial(a), polynomial(b)) for a, b in base]
    rng = random.Random(seed)
    while len(out) < n:
        k = rng.randint(2, 4)
        terms = {(0, k): 1}
        for _ in range(rng.randint(1, 3)):
            i, j = rng.randint(1, 3), rng.randint(0, k - 1)
            terms[(i, j)] = rng.randint(-3, 3)
        p = disc.ProjectionPair(polynomial("x"), TruncatedSeries(terms))
        try:
            disc.discriminant_by_elimination(p)
            p.degree()
        except (OracleRefusal, NonFiniteIntersection):
            continue
        out.append(p)
    return out[:n]


# --- suites ------------------------------------------------------------------------------

def _milnor_agreement_sample(i: int, seed: int, res: SuiteResult) -> None:
    k = cl.random_consistent_cluster(6, 4, seed + i)
    g, z = cl.to_resolution_graph(k)
    a = resgraph.generic_milnor(g, z)
    b = sum(n * (n - 1) for n in k.nu.values()) - sum(cl.excesses(k).values()) + 1
    c = germ.milnor(germ.generic_member_diagram(k))
    e = resgraph.multiplicity_from_cycle(g, z)
    ed = resgraph.discriminant_multiplicity(g, z)
    # appending a free point of multiplicity 0 must not change anything
    ext = WeightedCluster(Cluster(k.cluster.points + (Point("extra", k.ids[-1]),)), k.nu)
    g2, z2 = cl.to_resolution_graph(ext)
    same = (resgraph.generic_milnor(g2, z2), resgraph.multiplicity_from_cycle(g2, z2),
            resgraph.discriminant_multiplicity(g2, z2)) == (a, e, ed)
    ok = a == b == c and ed == a + e - 1 and same
    res.record(i, ok, f"points={len(k.ids)} mu={a}/{b}/{c} e={e} e_delta={ed}")


def _unloading_sample(i: int, seed: int, res: SuiteResult) -> None:
    k = unloading_corpus(1, seed * 1000 + i * 7)[0]
    u1, u2 = cl.unload(k.weighted, "first"), cl.unload(k.weighted, "last")
    eu = k.with_weights(u1)
    d = stability_degree(eu) + 1
    same_span = ideal_basis(k, d).rref_key() == ideal_basis(eu, d).rref_key()
    ok = u1 == u2 and cl.unload(u1) == u1 and same_span
    res.record(i, ok, f"nu={dict(k.nu)} -> {dict(u1.nu)} D={d} spans_equal={same_span}")


def _rees_sample(i: int, seed: int, res: SuiteResult) -> None:
    case = reduction_case(seed * 1000 + i)
    try:
        out = reduction_outcome(case)
    except (NonFiniteIntersection, OracleRefusal) as exc:
        res.record(i, None, f"{type(exc).__name__}: {exc}")
        return
    r = out.report
    res.record(i, out.consistent,
               f"rees={r.rees} e_J={r.e_j} e_I={r.e_i} superficial={r.f_superficial},{r.g_superficial} "
               f"separated={r.separated}")


def _le_greuel_sample(i: int, seed: int, res: SuiteResult) -> None:
    p = projection_corpus(i + 1, seed)[i]
    rows_e = disc.le_greuel_check(p, route="elimination")
    rows_p = disc.le_greuel_check(p, route="projection")
    checked = [r for r in rows_e if r.lhs is not None and r.rhs is not None]
    ok = (all(r.agrees for r in checked) and len(checked) >= 5
          and [r.lhs for r in rows_e] == [r.lhs for r in rows_p])
    res.record(i, ok, f"p=({p.f}, {p.g}) lines={len(checked)} "
                      f"transversal={sum(r.transversal for r in checked)}")


def _general_member_sample(i: int, seed: int, res: SuiteResult, members: int = 20) -> None:
    w = cl.random_consistent_cluster(5, 3, seed * 1000 + i)
    k = random_embedding(w, seed * 1000 + i)
    mu_i = cl.generic_milnor_cluster(w)
    d = max(stability_degree(k), 1) + 1
    basis = ideal_basis(k, d).basis
    ok, mus, sharp_count = True, [], 0
    for s in range(members):
        f = _combine(basis, random.Random(s), 9)
        mu = jacobian_colength(f).value
        dia, m = diagram_in(f, k)
        sharp = germ.goes_sharply_through(dia, w, m)
        sharp_count += sharp
        ok &= (mu == mu_i) == sharp and mu >= mu_i and germ.milnor(dia) == mu
        mus.append(mu)
    ok &= min(mus) == mu_i
    res.record(i, ok, f"points={len(w.ids)} mu_I={mu_i} min_mu={min(mus)} sharp={sharp_count}/{members}")


SUITES: dict[str, Callable[[int, int, SuiteResult], None]] = {
    "eq3-agreement": _milnor_agreement_sample,
    "unloading": _unloading_sample,
    "rees": _rees_sample,
    "le-greuel": _le_greuel_sample,
    "theorem23": _general_member_sample,
}


def run_suite(name: str, seed: int, samples: int) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(name)
    if samples < 1:
        raise ValueError("samples must be positive")
    res = SuiteResult(name)
    for i in range(samples):
        SUITES[name](i, seed, res)
    return res
