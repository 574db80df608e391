import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singkit import cluster as cl
from singkit import germ
from singkit.cluster import WeightedCluster
from singkit.errors import (InsufficientPrecision, IrrationalPoint, NonFiniteIntersection,
                            NonIsolatedSingularity, ParseError, PreconditionError)
from singkit.series import (INF, EmbeddedCluster, TruncatedSeries, colength, ideal_basis,
                            jacobian_colength, multiplicity_sequence, pair_colength, polynomial,
                            random_member, resolve, virtual_multiplicity_check)
from singkit.series.resolve import random_embedding, stability_degree, tangent_cone

P = polynomial
W = WeightedCluster.build


# --- truncated series ---------------------------------------------------------------

def test_parse_and_print():
    f = P("y^2 - x^3 + 1/2*x*y")
    assert f.coeffs == {(0, 2): 1, (3, 0): -1, (1, 1): Fraction(1, 2)}
    assert P(str(f)) == f
    assert "O(5)" in str(TruncatedSeries.parse("x + y", 5))
    with pytest.raises(ParseError):
        P("x +* y")


def test_arithmetic_respects_precision():
    a = TruncatedSeries.parse("x + y", 3)
    b = P("x^2")
    assert (a * b).prec == 5
    assert (a + b).prec == 3
    assert (a * a).coeffs == {(2, 0): 1, (1, 1): 2, (0, 2): 1}
    # terms at or above the precision are dropped
    assert TruncatedSeries.parse("x + y^4", 3).coeffs == {(1, 0): 1}


def test_order_and_leading_form():
    assert P("y^2 - x^3").order() == 2
    assert P("y^2 - x^3").leading_form() == {2: 1}
    assert P("x*y + x^5").derivative("x") == P("y + 5*x^4")
    with pytest.raises(InsufficientPrecision):
        TruncatedSeries.parse("x^5", 3).order()


@pytest.mark.parametrize("f, c, out", [
    ("y^2 - x^3", 0, "y^2 - x"),
    ("y^2 - x", INF, "x - y"),
    ("y - x^2", 0, "y - x"),
    ("y^2 - x^2", 1, "y^2 + 2*y"),
    ("x*y", INF, "y"),
])
def test_blow_up_examples(f, c, out):
    assert P(f).blow_up(c if c is INF else Fraction(c)) == P(out)


def test_blow_up_keeps_known_degrees():
    s = TruncatedSeries.parse("y^2 - x^3", 6).blow_up(Fraction(0))
    assert s.prec == 4 and s.coeffs == {(0, 2): 1, (1, 0): -1}


def test_virtual_transform():
    assert P("x^2 + y^3").virtual_transform(Fraction(0), 1) == P("x + x^2*y^3")
    with pytest.raises(ValueError):
        P("x").virtual_transform(Fraction(0), 2)


def test_tangent_cone_records_irrational_directions():
    cone = tangent_cone(P("y^2 - 2*x^2"))
    assert cone.rational == {} and cone.irrational[0][1] == 1
    assert tangent_cone(P("x*y^2")).rational == {Fraction(0): 2, INF: 1}


# --- resolution ---------------------------------------------------------------------

def mults(d):
    return tuple(d.e[p] for p in d.ids)


@pytest.mark.parametrize("f, expected, mu", [
    ("x", (1,), 0),
    ("x*y", (2,), 1),
    ("y^2 - x^3", (2, 1, 1), 2),
    ("y^2 - x^4", (2, 2), 3),
    ("y^2 - x^5", (2, 2, 1, 1), 4),
    ("y^3 - x^4", (3, 1, 1, 1), 6),
    ("x^3 - y^3", (3,), 4),
])
def test_multiplicity_sequence_examples(f, expected, mu):
    d = multiplicity_sequence(P(f))
    assert mults(d) == expected
    assert germ.milnor(d) == mu


def test_y2_minus_x5_diagram_shape():
    d = multiplicity_sequence(P("y^2 - x^5"))
    o, o1, o2, o3 = d.ids
    assert d.cluster[o2].is_free and d.cluster[o3].sat == o1


def test_resolution_refusals():
    with pytest.raises(PreconditionError):
        multiplicity_sequence(P("(y - x)^2*(y + x)"))
    with pytest.raises(NonFiniteIntersection):
        resolve([P("x*y"), P("x*(x + y)")])
    with pytest.raises(IrrationalPoint):
        multiplicity_sequence(P("(y^2 - 2*x^2)^2 + x^5"))
    with pytest.raises(InsufficientPrecision):
        multiplicity_sequence(TruncatedSeries.parse("y^2 - x^3", 3))


def test_resolution_with_repeated_components():
    d = resolve([P("y^2")], allow_multiple=True).diagrams[0]
    assert mults(d) == (2,)


def test_truncated_input_matches_exact():
    exact = multiplicity_sequence(P("y^3 - x^5"))
    trunc = multiplicity_sequence(TruncatedSeries.parse("y^3 - x^5 + x^20", 12))
    assert germ.equisingular(exact, trunc)


# --- colengths ----------------------------------------------------------------------

@pytest.mark.parametrize("a, b", [(1, 1), (2, 3), (4, 2), (1, 7)])
def test_pair_colength_monomials(a, b):
    assert pair_colength(P(f"x^{a}"), P(f"y^{b}")).value == a * b


def test_colength_of_monomial_ideal():
    # (x^3, xy, y^2): outside are 1, x, x^2, y
    assert colength([P("x^3"), P("x*y"), P("y^2")]).value == 4


@pytest.mark.parametrize("f, mu", [("x", 0), ("x*y", 1), ("y^2 - x^3", 2), ("x^3 - y^3", 4),
                                   ("y^3 - x^4", 6), ("x^2*y + y^4", 5)])
def test_jacobian_colength_examples(f, mu):
    c = jacobian_colength(P(f))
    assert c.value == mu and c.certified_precision >= 1


def test_jacobian_colength_refusals():
    with pytest.raises(NonIsolatedSingularity):
        jacobian_colength(P("x^2*y"))
    with pytest.raises(NonFiniteIntersection):
        pair_colength(P("x*y"), P("x^2"))


# --- clusters in coordinates ---------------------------------------------------------

XY2 = EmbeddedCluster(W([("O", None, None, 1), ("O1", "O", None, 1)]), {"O1": INF})
M2 = EmbeddedCluster(W([("O", None, None, 2)]), {})


def test_embedded_cluster_validation():
    k = W([("O", None, None, 1), ("O1", "O", None, 1), ("O2", "O1", "O", 1)])
    with pytest.raises(PreconditionError):
        EmbeddedCluster(k, {})                      # free point needs a coordinate
    with pytest.raises(PreconditionError):
        EmbeddedCluster(k, {"O1": 0, "O2": 1})      # satellites carry none


def test_membership_examples():
    assert virtual_multiplicity_check(P("x"), XY2).member
    assert not virtual_multiplicity_check(P("y"), XY2).member
    assert virtual_multiplicity_check(P("x + y^2"), XY2).member
    assert virtual_multiplicity_check(P("x*y"), M2).member
    assert not virtual_multiplicity_check(P("x + y^2"), M2).member


def basis_set(k, d):
    return {str(b) for b in ideal_basis(k, d).basis}


def test_ideal_basis_examples():
    m = EmbeddedCluster(W([("O", None, None, 1)]), {})
    b = ideal_basis(m, 3)
    assert b.codim == 1 and b.stable and len(b.basis) == 5
    b = ideal_basis(XY2, 3)
    assert b.codim == 2
    spans = basis_set(XY2, 3)
    assert "x" in spans and "y^2" in spans and "y" not in spans
    b = ideal_basis(M2, 3)
    assert b.codim == 3 and len(b.basis) == 3


def test_unstable_degree_reports_unstable():
    cusp = EmbeddedCluster(W([("O", None, None, 2), ("O1", "O", None, 1), ("O2", "O1", "O", 1)]),
                           {"O1": Fraction(0)})
    assert stability_degree(cusp) == 3
    assert not ideal_basis(cusp, 2).stable
    assert ideal_basis(cusp, 4).codim == 5


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_basis_elements_are_members(seed):
    w = cl.random_consistent_cluster(4, 3, seed)
    k = random_embedding(w, seed)
    d = stability_degree(k) + 1
    b = ideal_basis(k, d)
    assert b.stable and b.codim == cl.colength_cluster(w)
    for poly in b.basis[:6]:
        assert virtual_multiplicity_check(poly, k).member


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_random_member_order_and_values(seed):
    w = cl.random_consistent_cluster(4, 3, seed)
    k = random_embedding(w, seed)
    f = random_member(k, seed=seed)
    assert f.order() >= w.nu[w.cluster.root.id]
    assert virtual_multiplicity_check(f, k).member


def test_random_member_is_seeded():
    w = cl.random_consistent_cluster(4, 3, 7)
    k = random_embedding(w, 7)
    assert random_member(k, seed=3) == random_member(k, seed=3)
    assert random_embedding(w, 7) == random_embedding(w, 7)


def test_unloaded_cluster_same_span():
    raw = W([("O", None, None, 1), ("O1", "O", None, 1), ("O2", "O1", "O", 1)])
    e = EmbeddedCluster(raw, {"O1": Fraction(2)})
    u = e.with_weights(cl.unload(raw))
    assert ideal_basis(e, 5).rref_key() == ideal_basis(u, 5).rref_key() == ideal_basis(M2, 5).rref_key()


def test_generic_member_goes_sharply_through():
    rng = random.Random(0)
    cusp = EmbeddedCluster(W([("O", None, None, 2), ("O1", "O", None, 1), ("O2", "O1", "O", 1)]),
                           {"O1": Fraction(0)})
    f = random_member(cusp, seed=rng.randint(0, 99))
    d, m = resolve([f], cusp).diagrams[0], resolve([f], cusp).to_cluster[0]
    assert germ.goes_sharply_through(d, cusp.weighted, m)
    assert jacobian_colength(f).value == 2
