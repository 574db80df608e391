from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singkit import resgraph as rg
from singkit.errors import DomainError, InternalError, PreconditionError
from singkit.resgraph import Cycle, ResolutionGraph


def single(s=-1, genus=0):
    return ResolutionGraph((("E", s, genus),))


CHAIN = rg.chain([-2, -1])          # E1(-2) - E2(-1)
A1 = single(-2)
A3 = rg.chain([-2, -2, -2])


def star(center=-3, leaves=(-2, -2, -2)):
    verts = [("c", center, 0)] + [(f"l{i}", s, 0) for i, s in enumerate(leaves)]
    return ResolutionGraph(tuple(verts), tuple(("c", f"l{i}") for i in range(len(leaves))))


# --- construction ----------------------------------------------------------------

def test_rejects_nonnegative_self_intersection():
    with pytest.raises(PreconditionError):
        single(0)


def test_rejects_loops_and_unknown_vertices():
    with pytest.raises(PreconditionError):
        ResolutionGraph((("a", -2, 0),), (("a", "a"),))
    with pytest.raises(DomainError):
        ResolutionGraph((("a", -2, 0),), (("a", "b"),))


def test_rejects_disconnected_and_indefinite():
    with pytest.raises(PreconditionError):
        ResolutionGraph((("a", -2, 0), ("b", -2, 0)))
    # (-1)-(-1) has determinant 0
    with pytest.raises(PreconditionError):
        rg.chain([-1, -1])


def test_multiple_edges_counted():
    g = ResolutionGraph((("a", -3, 0), ("b", -3, 0)), (("a", "b"), ("b", "a")))
    assert g.matrix == ((-3, 2), (2, -3))
    assert g.edge_multiplicities()[("a", "b")] == 2


# --- intersect -----------------------------------------------------------------

def test_intersect_examples():
    e = Cycle({"E": 1})
    assert rg.intersect(single(), e, e) == -1
    a, b = Cycle({"1": 1, "2": 2}), Cycle({"2": 1})
    assert rg.intersect(CHAIN, a, b) == -1
    assert rg.intersect(CHAIN, a, Cycle()) == 0


def test_intersect_unknown_vertex():
    with pytest.raises(DomainError):
        rg.intersect(CHAIN, Cycle({"9": 1}), Cycle({"1": 1}))


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@settings(max_examples=60, deadline=None)
@given(st.lists(rationals, min_size=9, max_size=9), rationals, rationals)
def test_intersect_symmetric_bilinear(vals, s, t):
    g = A3
    a = Cycle(zip(g.ids, vals[0:3]))
    b = Cycle(zip(g.ids, vals[3:6]))
    c = Cycle(zip(g.ids, vals[6:9]))
    assert rg.intersect(g, a, b) == rg.intersect(g, b, a)
    assert rg.intersect(g, a * s + b * t, c) == s * rg.intersect(g, a, c) + t * rg.intersect(g, b, c)


# --- canonical cycle ------------------------------------------------------------

def test_canonical_cycle_examples():
    assert rg.canonical_cycle(single()) == Cycle({"E": 1})
    assert rg.canonical_cycle(A1) == Cycle()
    assert rg.canonical_cycle(CHAIN) == Cycle({"1": 1, "2": 2})


def test_canonical_cycle_rational_on_non_unimodular_graph():
    # a (-3)-curve: K.E = 1 gives K = -E/3
    k = rg.canonical_cycle(single(-3))
    assert k == Cycle({"E": Fraction(-1, 3)})
    assert not k.is_integral()


def test_canonical_cycle_with_genus():
    # elliptic (-1)-curve: K.E = 1 + 2 - 2 = 1, K = -E
    assert rg.canonical_cycle(single(-1, 1)) == Cycle({"E": -1})


# --- antinef / fundamental -------------------------------------------------------

def test_is_antinef_examples():
    assert rg.is_antinef(single(), Cycle({"E": 1}))
    assert rg.is_antinef(CHAIN, Cycle({"1": 1, "2": 2}))
    assert not rg.is_antinef(CHAIN, Cycle({"2": 1}))


def test_fundamental_cycle_examples():
    assert rg.fundamental_cycle(single()) == Cycle({"E": 1})
    for n in (2, 3, 5):
        g = rg.chain([-2] * n)
        assert rg.fundamental_cycle(g) == Cycle({str(i): 1 for i in range(1, n + 1)})
    z = rg.fundamental_cycle(star())
    assert all(z["c"] >= z[f"l{i}"] for i in range(3))


SMALL_GRAPHS = [single(), single(-2), CHAIN, A3, star(), star(-2), rg.chain([-3, -1, -2]),
                rg.chain([-2, -3, -2]), star(-2, (-2, -2, -3))]


@pytest.mark.parametrize("g", SMALL_GRAPHS)
def test_fundamental_cycle_is_minimal(g):
    z = rg.fundamental_cycle(g)
    assert rg.is_antinef(g, z) and all(z[v] > 0 for v in g.ids)
    for start in g.ids:
        assert rg.fundamental_cycle(g, start) == z
    # every positive antinef cycle in a small box dominates it
    for coeffs in product(range(1, 5), repeat=len(g.ids)):
        c = Cycle(zip(g.ids, coeffs))
        if rg.is_antinef(g, c):
            assert all(c[v] >= z[v] for v in g.ids)


# --- numbers read off a cycle----------------------------------------------------------

def test_generic_milnor_examples():
    assert rg.generic_milnor(single(), Cycle({"E": 1})) == 0
    assert rg.generic_milnor(single(), Cycle({"E": 2})) == 1
    assert rg.generic_milnor(A1, Cycle({"E": 1})) == 1


def test_generic_milnor_preconditions():
    with pytest.raises(PreconditionError):
        rg.generic_milnor(CHAIN, Cycle({"2": 1}))          # not antinef
    with pytest.raises(PreconditionError):
        rg.generic_milnor(A3, Cycle({"1": 1, "2": 1}))     # partial support


def test_generic_milnor_non_integral_is_internal_error():
    # for integral cycles the value is always an integer; a half cycle is not
    with pytest.raises(InternalError):
        rg.generic_milnor(single(), Cycle({"E": Fraction(1, 2)}))


def test_multiplicity_examples():
    assert rg.multiplicity_from_cycle(single(), Cycle({"E": 1})) == 1
    assert rg.multiplicity_from_cycle(single(), Cycle({"E": 2})) == 4
    assert rg.multiplicity_from_cycle(CHAIN, Cycle({"1": 1, "2": 2})) == 2


def test_discriminant_multiplicity_examples():
    assert rg.discriminant_multiplicity(single(), Cycle({"E": 1})) == 0
    assert rg.discriminant_multiplicity(CHAIN, Cycle({"1": 1, "2": 2})) == 1
    assert rg.discriminant_multiplicity(A1, Cycle({"E": 1})) == 2


def test_mu1_mu2_examples():
    assert rg.mu1_mu2(single(), Cycle({"E": 1})) == (0, 0)
    assert rg.mu1_mu2(A1, Cycle({"E": 1})) == (1, 1)
    assert rg.mu1_mu2(A3, rg.fundamental_cycle(A3)) == (1, 1)


@pytest.mark.parametrize("g", SMALL_GRAPHS)
def test_discriminant_identity_on_antinef_cycles(g):
    for coeffs in product(range(1, 4), repeat=len(g.ids)):
        z = Cycle(zip(g.ids, coeffs))
        if not rg.is_antinef(g, z):
            continue
        mu = rg.generic_milnor(g, z)
        assert mu >= 0
        assert rg.discriminant_multiplicity(g, z) == mu + rg.multiplicity_from_cycle(g, z) - 1


def test_cycle_arithmetic():
    a = Cycle({"1": 1, "2": Fraction(1, 2)})
    assert (a - a) == Cycle()
    assert a.reduced() == Cycle({"1": 1, "2": 1})
    assert (2 * a).is_integral()
    assert a.support == frozenset({"1", "2"})
    assert Cycle({"1": 0}) == Cycle()
