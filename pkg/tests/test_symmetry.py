import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geodex.errors import BadArgs, NotPermutation
from geodex.families import build, cycle, folded, halved
from geodex.metrics import all_geodesics, primitivity
from geodex.spaces import isometry_generators, point_action, space_make
from geodex.symmetry import (
    SPORADIC,
    census_count,
    census_screens,
    check_distance_transitive,
    check_geodesic_transitive,
    divisibility_screen,
    geodesic_orbits,
    group_order,
    is_primitive_group,
    lagrange_ok,
    orbits_on_arcs,
    orbits_on_tuples,
    perm_inv,
    perm_mul,
    prune_generators,
    schreier_sims,
    taylor_screen,
)


def adjacent_transpositions(n):
    out = []
    for i in range(n - 1):
        p = list(range(n))
        p[i], p[i + 1] = p[i + 1], p[i]
        out.append(p)
    return out


def closure_order(gens, n):
    """Independent oracle: enumerate the whole group by BFS over products."""
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    gens = [tuple(g) for g in gens]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                r = tuple(g[x] for x in p)
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return len(seen)


def test_schreier_sims_examples():
    assert group_order(adjacent_transpositions(5), 5) == 120
    assert group_order([], 7) == 1
    W = space_make("sp", 2, 2)
    pts, perms = point_action(W, isometry_generators(W))
    assert group_order(perms, len(pts)) == 720 == 2 ** 4 * (2 ** 2 - 1) * (2 ** 4 - 1)


def test_not_a_permutation():
    with pytest.raises(NotPermutation):
        group_order([[0, 0, 1]], 3)


def test_bsgs_invariants():
    b = schreier_sims(adjacent_transpositions(6), 6)
    assert b.order == math.prod(b.transversal_sizes) == 720
    for g in b.strong_generators:
        assert b.contains(g)
    assert not schreier_sims([[1, 0, 2, 3]], 4).contains([0, 1, 3, 2])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.permutations(list(range(7))), min_size=0, max_size=3))
def test_schreier_sims_matches_closure(gens):
    gens = [list(g) for g in gens]
    assert group_order(gens, 7) == closure_order(gens, 7)


@settings(max_examples=40, deadline=None)
@given(st.permutations(list(range(6))), st.permutations(list(range(6))))
def test_perm_algebra(p, q):
    p, q = np.asarray(p, dtype=np.int32), np.asarray(q, dtype=np.int32)
    pq = perm_mul(p, q)
    assert all(pq[x] == q[p[x]] for x in range(6))
    assert (perm_mul(p, perm_inv(p)) == np.arange(6)).all()


def test_prune_generators_keeps_group():
    gens = [np.asarray(g, dtype=np.int32) for g in adjacent_transpositions(5) * 2]
    keep = prune_generators(gens, 5)
    assert len(keep) <= 4
    assert group_order([gens[i] for i in keep], 5) == 120


def test_orbits_on_tuples_basic():
    rep = orbits_on_tuples([], [[3]], 5)
    assert rep.count == 1
    g, gens = build("hamming", k=3, m=2)
    D = g.distances()
    pairs = np.argwhere(D == 3)
    rep = orbits_on_tuples(gens.perms, pairs, g.n)
    assert rep.count == 1 and rep.total == 8 and sum(rep.sizes) == rep.total


def test_orbits_on_tuples_rejects_non_invariant():
    with pytest.raises(ValueError):
        orbits_on_tuples([[1, 0, 2]], [[0]], 3)


def test_polar_grassmann_two_geodesic_orbits():
    g, gens = build("polar_grassmann", space=space_make("sp", 3, 2), k=2)
    rep = orbits_on_tuples(gens.perms, all_geodesics(g, 2), g.n, "geodesics-of-length-2")
    assert rep.count == 2
    via = geodesic_orbits(g, gens.perms, 2, via_stabilizer=True)
    assert via.count == 2 and sorted(via.sizes) == sorted(rep.sizes)


@pytest.mark.parametrize("name,params", [("johnson", dict(n=5, k=2)), ("cycle", dict(k=6)),
                                         ("grassmann", dict(n=4, k=2, q=2))])
def test_distance_transitive(name, params):
    g, gens = build(name, **params)
    v = check_distance_transitive(g, gens.perms)
    assert v.holds and v.orbit_counts == [1] * (g.diameter + 1)


def test_polar_grassmann_distance_orbits_recorded():
    g, gens = build("polar_grassmann", space=space_make("sp", 3, 2), k=2)
    v = check_distance_transitive(g, gens.perms)
    assert len(v.reports) == 4
    assert v.orbit_counts[0] == 1
    assert all(sum(r.sizes) == r.total for r in v.reports)


@pytest.mark.parametrize("name,params", [("hamming", dict(k=3, m=2)), ("johnson", dict(n=6, k=3)),
                                         ("doubled_odd", dict(k=3)), ("odd", dict(k=3)),
                                         ("doubled_grassmann", dict(k=2, q=2)),
                                         ("incidence_opposites", dict(n=4, q=2))])
def test_geodesic_transitive_instances(name, params):
    g, gens = build(name, **params)
    v = check_geodesic_transitive(g, gens.perms)
    assert v.holds, v.orbit_counts
    assert check_distance_transitive(g, gens.perms).holds


def test_dual_polar_geodesic_transitive():
    g, gens = build("dual_polar", space=space_make("sp", 2, 2))
    assert check_geodesic_transitive(g, gens.perms).holds


def test_polar_grassmann_not_geodesic_transitive():
    g, gens = build("polar_grassmann", space=space_make("sp", 3, 2), k=2)
    v = check_geodesic_transitive(g, gens.perms)
    assert not v.holds and v.orbit_counts == [1, 1, 2, 1]


def test_stabilizer_path_agrees_with_closure():
    g, gens = build("johnson", n=7, k=3)
    for length in range(1, 4):
        a = geodesic_orbits(g, gens.perms, length, via_stabilizer=True)
        b = geodesic_orbits(g, gens.perms, length, via_stabilizer=False)
        assert a.count == b.count and a.total == b.total and sorted(a.sizes) == sorted(b.sizes)


def test_arc_orbits():
    g, gens = cycle(6)
    assert orbits_on_arcs(g, gens.perms, 2).count == 1
    g, gens = build("incidence_design", n=3, q=2)
    assert orbits_on_arcs(g, gens.perms, 4).count == 1
    g, gens = build("odd", k=3)
    assert orbits_on_arcs(g, gens.perms, 3).count == 1
    with pytest.raises(BadArgs):
        orbits_on_arcs(g, gens.perms, 0)


def test_lagrange():
    g, gens = build("johnson", n=6, k=3)
    order = group_order(gens.perms, g.n)
    for length in range(4):
        rep = orbits_on_tuples(gens.perms, all_geodesics(g, length), g.n)
        assert lagrange_ok(rep, order)


@pytest.mark.parametrize("make,part", [
    (lambda: build("doubled_odd", k=3), "halved"),
    (lambda: build("hamming", k=4, m=2), "folded"),
    (lambda: build("johnson", n=4, k=2), "folded"),
    (lambda: build("hamming", k=4, m=2), "halved"),
])
def test_quotients_inherit_geodesic_transitivity(make, part):
    g, gens = make()
    assert check_geodesic_transitive(g, gens.perms).holds
    h, hg = (halved(g, "plus", gens) if part == "halved" else folded(g, gens))
    assert check_geodesic_transitive(h, hg.perms).holds


@pytest.mark.parametrize("name,params", [("johnson", dict(n=5, k=2)), ("johnson", dict(n=6, k=3)),
                                         ("hamming", dict(k=3, m=2)), ("odd", dict(k=3)),
                                         ("doubled_odd", dict(k=3)), ("grassmann", dict(n=4, k=2, q=2)),
                                         ("doubled_grassmann", dict(k=2, q=2)), ("cycle", dict(k=7)),
                                         ("cycle", dict(k=8)), ("folded_johnson", dict(k=3))])
def test_group_primitivity_matches_graph(name, params):
    g, gens = build(name, **params)
    assert is_primitive_group(gens.perms, g.n) == (primitivity(g) == "primitive")


def test_divisibility_examples():
    assert divisibility_screen(6, 720)
    g1 = SPORADIC[0]
    L = census_count(g1["v"], g1["b"])
    assert L == 31_046_400 and g1["aut"] == 88_704_000
    assert not divisibility_screen(L, g1["aut"])
    pat = SPORADIC[2]
    L = census_count(pat["v"], pat["b"])
    assert L == 2 ** 13 * 3 ** 7 * 5 ** 3 * 7 * 11 * 13
    assert not divisibility_screen(L, pat["aut"])
    with pytest.raises(BadArgs):
        divisibility_screen(0, 5)


def test_sporadic_arrays_are_feasible():
    # k_i = k_{i-1} b_{i-1} / c_i must be integers summing to v
    for s in SPORADIC:
        ks = [1]
        for b, c in zip(s["b"], s["c"]):
            assert ks[-1] * b % c == 0
            ks.append(ks[-1] * b // c)
        assert sum(ks) == s["v"]


def test_taylor_examples():
    t5 = taylor_screen(5, 1)
    assert t5["passed"] and 4 % 6 != 0
    t9 = taylor_screen(9, 2)
    assert t9["passed"] and 8 % 10 and 80 % 82


def test_census_screens():
    rep = census_screens(100)
    assert rep["passed"] and not rep["taylor_failures"]
    assert rep["taylor_checked"] == sum(1 for q in range(5, 101, 2) if _odd_pp(q))
    g2 = next(s for s in rep["sporadic"] if s["name"] == "Gamma2")
    assert g2["L"] == 280 * 9 * 8 * 6 * 3 and not g2["divides"]
    with pytest.raises(BadArgs):
        census_screens(4)


def _odd_pp(q):
    p = next(d for d in range(2, q + 1) if q % d == 0)
    while q % p == 0:
        q //= p
    return q == 1
