import itertools
from collections import defaultdict

import pytest

from geodex.algebra import subspace_make
from geodex.errors import (
    BadArgs,
    BadType,
    MaximalNotAllowed,
    NotAGeodesic,
    NotDistinct,
    NotSingular,
    OppositeEnds,
)
from geodex.families import build
from geodex.metrics import all_geodesics
from geodex.polar_geo import (
    bell,
    c_tau,
    c_tau_stepwise,
    enumerate_types,
    is_opposite,
    nonopposite_orbit_count,
    not_drg_witness,
    orbit_fingerprint,
    partition_oracle,
    pg_distance,
    pg_geodesic_normalize,
    predicted_orbit_profile,
    reconstruct,
    type_of,
)
from geodex.spaces import isometry_generators, space_make
from geodex.symmetry import orbits_on_tuples


def unit(n, i):
    return tuple(1 if j == i else 0 for j in range(n))


def span(W, idx):
    return subspace_make(W.field, [unit(W.n, i) for i in idx], W.n)


@pytest.fixture(scope="module")
def pg62():
    W = space_make("sp", 3, 2)
    g, gens = build("polar_grassmann", space=W, k=2)
    return W, g, gens


def test_opposite_examples():
    W = space_make("sp", 2, 2)
    r = is_opposite(W, span(W, [0]), span(W, [2]))
    assert r.verdict and r.cross_checked
    assert not is_opposite(W, span(W, [0]), span(W, [1])).verdict
    W6 = space_make("sp", 3, 2)
    r = is_opposite(W6, span(W6, [0, 1]), span(W6, [3, 4]))
    assert r.verdict and all(w.dim == 0 for w in r.witnesses)
    assert r.as_dict()["opposite"] is True


def test_opposite_errors():
    W = space_make("sp", 2, 2)
    with pytest.raises(NotDistinct):
        is_opposite(W, span(W, [0]), span(W, [0]))
    with pytest.raises(MaximalNotAllowed):
        is_opposite(W, span(W, [0, 1]), span(W, [2, 3]))
    W6 = space_make("sp", 3, 2)
    with pytest.raises(NotSingular):
        is_opposite(W6, span(W6, [0, 1]), span(W6, [0, 3]))


def test_condition_iii_agrees_with_condition_i_everywhere(pg62):
    W, g, _ = pg62
    for a in range(0, g.n, 11):
        for b in range(g.n):
            if a != b:
                is_opposite(W, g.labels[a], g.labels[b], cross_check=True)


@pytest.mark.parametrize("kind,omega,q,k", [("sp", 2, 2, 1), ("sp", 3, 2, 1), ("sp", 2, 3, 1),
                                            pytest.param("orthogonal_odd", 3, 3, 1, marks=pytest.mark.slow)])
def test_distance_matches_bfs_all_pairs(kind, omega, q, k):
    W = space_make(kind, omega, q)
    g, _ = build("polar_grassmann", space=W, k=k)
    D = g.distances()
    for a, b in itertools.product(range(g.n), repeat=2):
        assert pg_distance(W, k, g.labels[a], g.labels[b]) == D[a, b]


def test_distance_matches_bfs_o73_rows():
    W = space_make("orthogonal_odd", 3, 3)
    g, _ = build("polar_grassmann", space=W, k=1)
    D = g.distances()
    for a in range(0, g.n, 97):
        for b in range(g.n):
            assert pg_distance(W, 1, g.labels[a], g.labels[b]) == D[a, b]


def test_distance_matches_bfs_sp62_k2(pg62):
    W, g, _ = pg62
    D = g.distances()
    for a in range(0, g.n, 7):
        for b in range(g.n):
            assert pg_distance(W, 2, g.labels[a], g.labels[b]) == D[a, b]


@pytest.mark.slow
def test_distance_matches_bfs_sp62_k2_all_pairs(pg62):
    W, g, _ = pg62
    D = g.distances()
    for a, b in itertools.product(range(g.n), repeat=2):
        assert pg_distance(W, 2, g.labels[a], g.labels[b]) == D[a, b]


def test_distance_examples(pg62):
    W, g, _ = pg62
    X = span(W, [0, 1])
    assert pg_distance(W, 2, X, X) == 0
    assert pg_distance(W, 2, X, span(W, [0, 2])) == 1
    assert pg_distance(W, 2, X, span(W, [3, 4])) == 3


def test_normal_forms_over_all_geodesics_from_a_vertex(pg62):
    W, g, _ = pg62
    seen_f1_pairings = set()
    for length in (1, 2, 3):
        for row in all_geodesics(g, length, starts=[0]).tolist():
            L = [g.labels[v] for v in row]
            nf = pg_geodesic_normalize(W, L)
            assert reconstruct(W, nf) == L
            opp = is_opposite(W, L[0], L[-1], cross_check=False).verdict
            assert nf.case == ("F2" if opp else "F1")
            if nf.case == "F2":
                assert nf.pairing == {i: i for i in range(1, nf.m + 1)}
                assert len(nf.x) == nf.m + 1
            else:
                assert all(j < i for i, j in nf.pairing.items())
                assert len(set(nf.pairing.values())) == len(nf.pairing)
                if length == 1:
                    assert nf.m == 1 and nf.pairing == {}
                if length == 2 and (L[0] & L[-1]).dim == 0:
                    seen_f1_pairings.add(tuple(sorted(nf.pairing.items())))
                    assert type_of(W, L) == (1, 1)
    # with cap omega - k = 1 every such 2-geodesic carries the pairing 2 -> 1
    assert seen_f1_pairings == {((2, 1),)}


def test_normalize_rejects_non_geodesic(pg62):
    W, g, _ = pg62
    with pytest.raises(NotAGeodesic):
        pg_geodesic_normalize(W, [g.labels[0], g.labels[0]])


def test_type_of(pg62):
    W, g, _ = pg62
    u = int(g.neighbors(0)[0])
    assert type_of(W, [g.labels[0], g.labels[u]]) == (1,)
    X = span(W, [0, 1])
    with pytest.raises(OppositeEnds):
        row = next(r for r in all_geodesics(g, 3, starts=[g.index(X)]).tolist())
        type_of(W, [g.labels[v] for v in row])


def test_type_12_in_sp82():
    W = space_make("sp", 4, 2)
    # e = 0..3, f = 4..7; X0=<e1,e2>, X1=<e1,e3>, X2=<e3,e4>: X2 avoids X0 and meets X0^perp in a 2-space
    L = [span(W, [0, 1]), span(W, [0, 2]), span(W, [2, 3])]
    assert pg_distance(W, 2, L[0], L[2]) == 2
    assert type_of(W, L) == (1, 2)
    assert pg_geodesic_normalize(W, L).pairing == {}
    L2 = [span(W, [0, 1]), span(W, [0, 2]), span(W, [2, 5])]
    assert type_of(W, L2) == (1, 1)
    assert orbit_fingerprint(W, L) != orbit_fingerprint(W, L2)


def test_fingerprint_is_invariant(pg62):
    W, g, _ = pg62
    u = int(g.neighbors(0)[0])
    fp = orbit_fingerprint(W, [g.labels[0], g.labels[u]])
    assert fp[0][1] == 1
    row = all_geodesics(g, 3, starts=[0]).tolist()[0]
    L = [g.labels[v] for v in row]
    fp = orbit_fingerprint(W, L)
    for iso in isometry_generators(W)[:25]:
        assert orbit_fingerprint(W, [iso.apply_subspace(X) for X in L]) == fp


def test_fingerprints_separate_brute_force_orbits(pg62):
    W, g, gens = pg62
    for length in (1, 2, 3):
        paths = all_geodesics(g, length)
        rep = orbits_on_tuples(gens.perms, paths, g.n)
        assert rep.count == predicted_orbit_profile(W, 2)[length - 1]
        fps = {orbit_fingerprint(W, [g.labels[v] for v in r]) for r in rep.representatives}
        assert len(fps) == rep.count
    # orbit-constant on a sample of each orbit
    paths = all_geodesics(g, 2, starts=[0]).tolist()
    by_fp = defaultdict(set)
    for r in paths:
        L = [g.labels[v] for v in r]
        by_fp[orbit_fingerprint(W, L)].add(is_opposite(W, L[0], L[-1], cross_check=False).verdict)
    assert all(len(v) == 1 for v in by_fp.values())


@pytest.mark.parametrize("t,c", [((1, 1, 2, 3), 1), ((1, 2, 2, 2), 4), ((1, 2, 3, 3), 3)])
def test_c_tau_examples(t, c):
    assert c_tau(t) == c == c_tau_stepwise(t)


def test_c_tau_rejects_bad_types():
    for t in [(), (2,), (1, 3), (1, 2, 1)]:
        with pytest.raises(BadType):
            c_tau(t)


def test_enumerate_types():
    assert enumerate_types(1, 3) == [(1,)]
    assert len(enumerate_types(4, 4)) == 8
    # at most one up-step among three: 1111, 1112, 1122, 1222
    assert enumerate_types(4, 2) == [(1, 1, 1, 1), (1, 1, 1, 2), (1, 1, 2, 2), (1, 2, 2, 2)]
    for t in enumerate_types(6, 3):
        assert t[0] == 1 and max(t) <= 3
        assert all(b - a in (0, 1) for a, b in zip(t, t[1:]))
        assert c_tau(t) == c_tau_stepwise(t)


def test_orbit_count_examples():
    assert [nonopposite_orbit_count(m, 8, 4) for m in range(1, 5)] == [1, 2, 5, 15]
    assert [nonopposite_orbit_count(m, 6, 4) for m in range(1, 5)] == [1, 2, 4, 8]
    assert nonopposite_orbit_count(5, 10, 5) == 52
    with pytest.raises(BadArgs):
        nonopposite_orbit_count(3, 4, 2)


def test_bell_and_partitions():
    assert [bell(m) for m in range(1, 9)] == [1, 2, 5, 15, 52, 203, 877, 4140]
    assert partition_oracle(4, 2) == 8
    for m in range(1, 9):
        assert partition_oracle(m, m) == bell(m)


def test_two_counting_methods_agree():
    for m in range(1, 9):
        for cap in range(1, 9):
            assert sum(c_tau(t) for t in enumerate_types(m, cap)) == partition_oracle(m, cap)


def test_partition_oracle_against_brute_force():
    # rhyme schemes: sequences starting at 0, each entry at most one more than the running max
    for m in range(1, 7):
        for cap in range(1, m + 1):
            count = 0
            for s in itertools.product(range(cap), repeat=m):
                if s[0] == 0 and all(s[i] <= max(s[:i]) + 1 for i in range(1, m)):
                    count += 1
            assert count == partition_oracle(m, cap)


def test_predicted_profiles():
    assert predicted_orbit_profile(space_make("sp", 3, 2), 2) == [1, 2, 1]
    assert predicted_orbit_profile(space_make("sp", 4, 2), 2) == [1, 3, 1]
    assert predicted_orbit_profile(space_make("sp", 3, 2), 1) == [1, 1]
    with pytest.raises(BadArgs):
        predicted_orbit_profile(space_make("sp", 3, 2), 3)


@pytest.mark.parametrize("omega,q", [(2, 2), (3, 2), (2, 3)])
def test_polar_graphs_are_geodesic_transitive(omega, q):
    from geodex.symmetry import check_geodesic_transitive

    W = space_make("sp", omega, q)
    g, gens = build("polar_grassmann", space=W, k=1)
    v = check_geodesic_transitive(g, gens.perms)
    assert v.holds and v.orbit_counts[1:] == predicted_orbit_profile(W, 1)


def test_witness():
    for omega, k in [(3, 2), (4, 3)]:
        cert = not_drg_witness(space_make("sp", omega, 2), k)
        assert cert.valid, cert.as_dict()
        assert cert.max_from_X1_neighbours <= 2
    with pytest.raises(BadArgs):
        not_drg_witness(space_make("sp", 3, 2), 1)


def test_witness_against_bfs(pg62):
    W, g, _ = pg62
    cert = not_drg_witness(W, 2)
    D = g.distances()
    i = {name: g.index(S) for name, S in (("X", cert.X), ("X1", cert.X1), ("X2", cert.X2), ("Y2", cert.Y2))}
    assert D[i["X"], i["X1"]] == D[i["X"], i["X2"]] == 2
    assert D[i["X2"], i["Y2"]] == 1 and D[i["X"], i["Y2"]] == 3
    assert max(D[i["X"], int(u)] for u in g.neighbors(i["X1"])) <= 2


@pytest.mark.slow
def test_sp82_profile_brute_force():
    from geodex.symmetry import geodesic_orbits, group_order
    from geodex.spaces import classical_order

    W = space_make("sp", 4, 2)
    g, gens = build("polar_grassmann", space=W, k=2)
    order = classical_order(W)
    counts = [geodesic_orbits(g, gens.perms, length, via_stabilizer=True, order=order).count
              for length in (1, 2, 3)]
    assert counts == predicted_orbit_profile(W, 2) == [1, 3, 1]
