from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singkit import cluster as cl
from singkit import resgraph as rg
from singkit.cluster import Cluster, Point, WeightedCluster
from singkit.errors import PreconditionError
from singkit.resgraph import Cycle
from singkit.series import EmbeddedCluster, ideal_basis

W = WeightedCluster.build


def m(k=1):
    return W([("O", None, None, k)])


def chain(a=1, b=1):
    return W([("O", None, None, a), ("O1", "O", None, b)])


def cusp_cluster(a=2, b=1, c=1):
    return W([("O", None, None, a), ("O1", "O", None, b), ("O2", "O1", "O", c)])


# --- structure -----------------------------------------------------------------------

def test_satellite_condition_enforced():
    # O2 cannot be proximate to O unless its parent is
    with pytest.raises(PreconditionError):
        Cluster.build([("O",), ("O1", "O"), ("O2", "O1"), ("O3", "O2", "O")])
    Cluster.build([("O",), ("O1", "O"), ("O2", "O1", "O"), ("O3", "O2", "O")])


def test_origin_and_order():
    with pytest.raises(PreconditionError):
        Cluster((Point("a", "b"),))
    with pytest.raises(PreconditionError):
        Cluster.build([("O",), ("O2", "O1"), ("O1", "O")])
    with pytest.raises(PreconditionError):
        Cluster.build([("O",), ("O",)])


def test_proximity_sets():
    c = cusp_cluster().cluster
    assert c.proximate_to("O2") == ("O1", "O")
    assert c.proximate_points("O") == ("O1", "O2")
    assert c.children("O") == ("O1",)


def test_weights_for_unknown_points_rejected():
    with pytest.raises(PreconditionError):
        WeightedCluster(m().cluster, {"X": 1})


# --- excesses / consistency / values ----------------------------------------------------

def test_excesses_examples():
    assert cl.excesses(m()) == {"O": 1}
    assert cl.excesses(chain()) == {"O": 0, "O1": 1}
    assert cl.excesses(chain(0, 1)) == {"O": -1, "O1": 1}


def test_is_consistent_examples():
    assert cl.is_consistent(m(2))
    assert cl.is_consistent(chain())
    assert not cl.is_consistent(chain(0, 1))


def test_values_examples():
    assert cl.values(m()) == {"O": 1}
    assert cl.values(chain()) == {"O": 1, "O1": 2}
    assert cl.values(cusp_cluster()) == {"O": 2, "O1": 3, "O2": 6}


# --- unloading -----------------------------------------------------------------------------

def test_unload_consistent_is_fixed_point():
    k = cusp_cluster()
    assert cl.unload(k) == k


def test_unload_examples():
    # a tame step adds E_p to the cycle: nu_p + 1 and -1 at every point proximate to p
    assert cl.unload(chain(0, 1)).nu == {"O": 1, "O1": 0}
    assert cl.unload(cusp_cluster(1, 1, 1)).nu == {"O": 2, "O1": 0, "O2": 0}


@pytest.mark.parametrize("raw", [chain(0, 1), cusp_cluster(1, 1, 1), cusp_cluster(1, 2, 1),
                                 W([("O", None, None, 1), ("O1", "O", None, 1), ("O2", "O1", None, 2)])])
def test_unload_defines_the_same_ideal(raw):
    coords = {p: Fraction(0) for p in raw.ids if raw.cluster[p].is_free and p != "O"}
    e = EmbeddedCluster(raw, coords)
    u = e.with_weights(cl.unload(raw))
    assert ideal_basis(e, 6).rref_key() == ideal_basis(u, 6).rref_key()


def test_unload_to_unit_ideal_rejected():
    with pytest.raises(PreconditionError):
        cl.unload(chain(-1, 0))


def test_unload_bad_policy():
    with pytest.raises(ValueError):
        cl.unload(chain(0, 1), policy="random")


def random_weights(seed, low=-1, high=3):
    import random

    rng = random.Random(seed)
    base = cl.random_consistent_cluster(6, 3, seed)
    return WeightedCluster(base.cluster, {p: rng.randint(low, high) for p in base.ids})


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000))
def test_unload_idempotent_and_order_independent(seed):
    k = random_weights(seed)
    try:
        a = cl.unload(k, "first")
    except PreconditionError:
        return
    assert cl.unload(k, "last") == a
    assert cl.unload(a) == a
    assert cl.is_consistent(a)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000))
def test_unload_raises_values(seed):
    k = random_weights(seed, 0, 3)
    if not any(k.nu.values()):
        return
    u = cl.unload(k)
    v, vu = cl.values(k), cl.values(u)
    assert all(vu[p] >= v[p] for p in k.ids)


# --- resolution graph ------------------------------------------------------------------------

def test_to_resolution_graph_examples():
    g, z = cl.to_resolution_graph(m())
    assert g.vertices == (("O", -1, 0),) and z == Cycle({"O": 1})
    g, z = cl.to_resolution_graph(chain())
    assert g.matrix == ((-2, 1), (1, -1)) and z == Cycle({"O": 1, "O1": 2})
    g, z = cl.to_resolution_graph(cusp_cluster())
    assert [s for _, s, _ in g.vertices] == [-3, -2, -1]
    assert set(g.edges) == {("O", "O2"), ("O1", "O2")}
    assert z == Cycle({"O": 2, "O1": 3, "O2": 6})
    assert abs(g.determinant()) == 1 and rg.is_antinef(g, z)


def test_to_resolution_graph_requires_consistency():
    with pytest.raises(PreconditionError):
        cl.to_resolution_graph(chain(0, 1))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000))
def test_graph_invariants_on_random_clusters(seed):
    k = cl.random_consistent_cluster(6, 4, seed)
    g, z = cl.to_resolution_graph(k)
    assert rg.is_antinef(g, z) and all(z[p] > 0 for p in g.ids)
    assert rg.canonical_cycle(g).is_integral()
    assert rg.multiplicity_from_cycle(g, z) == sum(n * n for n in k.nu.values())
    mu = sum(n * (n - 1) for n in k.nu.values()) - sum(cl.excesses(k).values()) + 1
    assert rg.generic_milnor(g, z) == mu


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.data())
def test_zero_weight_free_point_changes_nothing(seed, data):
    k = cl.random_consistent_cluster(6, 4, seed)
    parent = data.draw(st.sampled_from(k.ids))
    ext = WeightedCluster(Cluster(k.cluster.points + (Point("z", parent),)), k.nu)
    g, z = cl.to_resolution_graph(k)
    g2, z2 = cl.to_resolution_graph(ext)
    for f in (rg.generic_milnor, rg.multiplicity_from_cycle, rg.discriminant_multiplicity):
        assert f(g, z) == f(g2, z2)


# --- invariants -------------------------------------------------------------------------------

def test_multiplicity_cluster_examples():
    assert cl.multiplicity_cluster(m()) == 1
    assert cl.multiplicity_cluster(m(2)) == 4
    assert cl.multiplicity_cluster(chain()) == 2


def test_generic_milnor_cluster_examples():
    assert cl.generic_milnor_cluster(m()) == 0
    assert cl.generic_milnor_cluster(m(2)) == 1
    assert cl.generic_milnor_cluster(chain()) == 0
    assert cl.generic_milnor_cluster(cusp_cluster()) == 2


def test_colength_cluster():
    assert cl.colength_cluster(m(2)) == 3
    assert cl.colength_cluster(cusp_cluster()) == 5


def test_same_complete_ideal_examples():
    k = cusp_cluster()
    assert cl.same_complete_ideal(k, k)
    # O(0),O1(1) unloads to the maximal ideal
    assert cl.same_complete_ideal(chain(0, 1), m())
    assert not cl.same_complete_ideal(chain(0, 1), chain(1, 1))
    assert not cl.same_complete_ideal(m(1), m(2))


def test_prune_keeps_zero_points_with_weighted_descendants():
    k = W([("O", None, None, 1), ("O1", "O", None, 0), ("O2", "O1", None, 0)])
    assert cl.prune(k).ids == ("O",)


# --- generator ---------------------------------------------------------------------------------

def test_random_cluster_contract():
    for seed in range(20):
        k = cl.random_consistent_cluster(1, 3, seed)
        assert len(k.ids) == 1 and 1 <= k.nu[k.ids[0]] <= 3
    assert cl.random_consistent_cluster(4, 3, 42) == cl.random_consistent_cluster(4, 3, 42)
    for seed in range(50):
        assert cl.is_consistent(cl.random_consistent_cluster(6, 4, seed))
