from fractions import Fraction

import pytest

from singkit.errors import EliminationFailed, NonFiniteIntersection, PreconditionError
from singkit.series import polynomial
from singkit.series.discriminant import (ProjectionPair, discriminant_by_elimination,
                                         generic_discriminant_multiplicity, jacobian_determinant,
                                         le_greuel_check, pencil_scan, projection_line_intersection)

P = polynomial


def pair(f, g):
    return ProjectionPair(P(f), P(g))


def uv_terms(d):
    """Discriminant equation as {(i, j): coeff} normalized to leading coefficient 1."""
    raw = {(int(i), int(j)): Fraction(int(c.p), int(c.q)) for (i, j, _), c in
           ((m, c) for m, c in d.equation.to_dict().items())}
    lead = raw[max(raw)]
    return {k: v / lead for k, v in raw.items()}


def test_jacobian_determinant():
    assert jacobian_determinant(P("x"), P("y^3 + x*y")) == P("3*y^2 + x")


def test_projection_pair_validation():
    with pytest.raises(PreconditionError):
        pair("1 + x", "y")
    with pytest.raises(NonFiniteIntersection):
        pair("x", "x*y").degree()


@pytest.mark.parametrize("g, terms, mult, deg", [
    ("y", {(0, 0): 1}, 0, 1),
    ("y^2", {(0, 1): 1}, 1, 2),
    ("y^3", {(0, 2): 1}, 2, 3),
    ("y^3 + x*y", {(3, 0): 1, (0, 2): Fraction(27, 4)}, 2, 3),
])
def test_discriminant_equations(g, terms, mult, deg):
    p = pair("x", g)
    d = discriminant_by_elimination(p)
    assert uv_terms(d) == terms
    assert d.multiplicity == mult
    assert p.degree().value == deg


def test_discriminant_with_swapped_roles():
    d = discriminant_by_elimination(pair("y^2", "x"))
    assert d.swapped
    assert d.line_intersection(0, 1) == 1       # the line u = 0 of the source pair
    assert d.line_intersection(1, 0) is None    # v = 0 is the discriminant itself


def test_elimination_refusals():
    with pytest.raises(EliminationFailed):
        discriminant_by_elimination(pair("x^2", "y^3"))
    with pytest.raises(EliminationFailed):
        # y = 1 is a second critical point in the fibre over the origin
        discriminant_by_elimination(pair("x", "y^4 - 2*y^3 + y^2"))


def test_line_intersections_for_cusp_map():
    d = discriminant_by_elimination(pair("x", "y^3 + x*y"))
    # 4 u^3 + 27 v^2: a generic line meets it twice, the tangent line v = 0 three times
    assert d.line_intersection(1, 1) == 2
    assert d.line_intersection(1, 0) == 2
    assert d.line_intersection(0, 1) == 3


def test_projection_formula_matches_elimination():
    p = pair("x", "y^3 + x*y")
    d = discriminant_by_elimination(p)
    for a, b in ((1, 0), (0, 1), (1, 1), (2, -1), (1, 3)):
        assert projection_line_intersection(p, a, b) == d.line_intersection(a, b)


def test_pencil_scan_flags_special_members():
    scan = pencil_scan(pair("x", "y^2"))
    flagged = [(s.alpha, s.beta) for s in scan.samples if s.special]
    assert flagged == [(0, 1)]
    assert scan.degree == 2 and scan.generic_mu == 0
    with pytest.raises(PreconditionError):
        pencil_scan(pair("x", "y"), [(0, 0)])


@pytest.mark.parametrize("g", ["y", "y^2", "y^3", "y^3 + x*y", "y^4 + x^2*y"])
def test_le_greuel_formula(g):
    p = pair("x", g)
    for route in ("elimination", "projection"):
        rows = le_greuel_check(p, route=route)
        checked = [r for r in rows if r.lhs is not None and r.rhs is not None]
        assert checked and all(r.agrees for r in checked)
        assert sum(r.transversal for r in checked) >= 5


def test_le_greuel_rejects_unknown_route():
    with pytest.raises(ValueError):
        le_greuel_check(pair("x", "y"), route="guess")


def test_generic_discriminant_multiplicity():
    assert generic_discriminant_multiplicity(pair("x", "y")) == 0
    assert generic_discriminant_multiplicity(pair("x", "y^3 + x*y")) == 2
    # not linear in either component: only the projection route applies
    assert generic_discriminant_multiplicity(pair("x^2", "y^2")) == 4
