import itertools
import json
import random

import pytest

from geodex.algebra import enumerate_subspaces, full_space, maximal_flags, subspace_make, zero_subspace
from geodex.errors import AmbientMismatch, NotASquare, NotOppositeMaximals, UnsupportedCharacteristic
from geodex.spaces import (
    Isometry,
    check_frame,
    classical_order,
    enumerate_singular,
    hyperbolic_extend,
    is_singular,
    isometry_generators,
    perp,
    point_action,
    preserves_form,
    space_dumps,
    space_from_json,
    space_make,
    standard_frame,
)
from geodex.algebra import mat_identity
from geodex.symmetry import group_order


def unit(n, i):
    return tuple(1 if j == i else 0 for j in range(n))


def test_sp42_every_vector_isotropic():
    W = space_make("symplectic", 2, 2)
    assert W.n == 4
    vecs = [v for v in itertools.product(range(2), repeat=4) if any(v)]
    assert len(vecs) == 15
    assert all(W.form(v, v) == 0 for v in vecs)


def test_o_minus_witt_index():
    W = space_make("orthogonal_minus", 2, 3)
    assert W.n == 6
    check_frame(W, standard_frame(W))
    # no singular 3-space: no singular 2-space extends
    lines = enumerate_singular(W, 2)
    for L in lines:
        P = perp(W, L)
        for v in P.vectors():
            if any(v) and not L.contains_vector(v):
                assert not is_singular(W, subspace_make(W.field, L.basis + (v,), W.n))


def test_unitary_odd_hermitian():
    W = space_make("unitary_odd", 2, 4)
    F = W.field
    assert W.n == 5
    for a in F.elements():
        assert W.sigma(a) == F.pow(a, 2)
    G = W.gram
    assert all(G[i][j] == F.sigma(G[j][i]) for i in range(5) for j in range(5))


@pytest.mark.parametrize("kind,dim", [("symplectic", 6), ("orthogonal_odd", 7), ("orthogonal_plus", 6),
                                      ("orthogonal_minus", 8), ("unitary_odd", 7), ("unitary_even", 6)])
def test_ambient_dimensions(kind, dim):
    q = 4 if kind.startswith("unitary") else 3
    assert space_make(kind, 3, q).n == dim


def test_construction_errors():
    with pytest.raises(UnsupportedCharacteristic):
        space_make("orthogonal_plus", 2, 4)
    with pytest.raises(NotASquare):
        space_make("unitary_even", 2, 3)


def test_perp_trivial_and_point():
    W = space_make("sp", 2, 2)
    F = W.field
    assert perp(W, zero_subspace(F, 4)) == full_space(F, 4)
    assert perp(W, full_space(F, 4)).dim == 0
    e1 = subspace_make(F, [unit(4, 0)])
    P = perp(W, e1)
    assert P.dim == 3 and e1 <= P


def test_perp_ambient_mismatch():
    W = space_make("sp", 2, 2)
    with pytest.raises(AmbientMismatch):
        perp(W, zero_subspace(W.field, 5))


def test_perp_involution_and_order_reversing_sp42():
    W = space_make("sp", 2, 2)
    F = W.field
    subs = [S for k in range(5) for S in enumerate_subspaces(F, 4, k)]
    for U in subs:
        P = perp(W, U)
        assert P.dim == 4 - U.dim
        assert perp(W, P) == U
    rng = random.Random(0)
    for U, V in (rng.sample(subs, 2) for _ in range(300)):
        if U <= V:
            assert perp(W, V) <= perp(W, U)


def test_is_singular_examples():
    W = space_make("sp", 2, 2)
    F = W.field
    assert is_singular(W, zero_subspace(F, 4))
    assert all(is_singular(W, P) for P in enumerate_subspaces(F, 4, 1))
    O = space_make("orthogonal_odd", 2, 3)
    tail = subspace_make(O.field, [unit(5, 4)])
    assert O.quad(unit(5, 4)) != 0
    assert not is_singular(O, tail)


@pytest.mark.parametrize("kind,q,k,count", [("sp", 2, 1, 15), ("sp", 2, 2, 15), ("orthogonal_odd", 3, 1, 40),
                                            ("orthogonal_odd", 3, 2, 40)])
def test_enumerate_singular_exhaustive(kind, q, k, count):
    W = space_make(kind, 2, q)
    sing = enumerate_singular(W, k)
    assert len(sing) == count
    assert all(is_singular(W, S) for S in sing)
    others = [S for S in enumerate_subspaces(W.field, W.n, k) if is_singular(W, S)]
    assert set(others) == set(sing)


def test_sp62_lines():
    assert len(enumerate_singular(space_make("sp", 3, 2), 2)) == 315


@pytest.mark.parametrize("omega,q", [(2, 2), (2, 3), (3, 2),
                                     pytest.param(3, 3, marks=pytest.mark.slow)])
def test_maximal_count_formula(omega, q):
    expected = 1
    for i in range(1, omega + 1):
        expected *= q ** i + 1
    assert len(enumerate_singular(space_make("sp", omega, q), omega)) == expected


def test_frames():
    for kind, q in [("sp", 3), ("orthogonal_odd", 3), ("unitary_even", 4)]:
        W = space_make(kind, 2, q)
        fr = standard_frame(W)
        check_frame(W, fr)
        assert len(fr.x) == len(fr.y) == 2


def test_hyperbolic_extend_sp42():
    W = space_make("sp", 2, 2)
    F = W.field
    X = subspace_make(F, [unit(4, 0), unit(4, 1)])
    Y = subspace_make(F, [unit(4, 2), unit(4, 3)])
    flag = (subspace_make(F, [unit(4, 2)]), Y)
    fr = hyperbolic_extend(W, X, flag)
    check_frame(W, fr)
    assert subspace_make(F, [fr.y[0]]) == flag[0]
    assert subspace_make(F, fr.x) == X
    with pytest.raises(NotOppositeMaximals):
        hyperbolic_extend(W, Y, flag)


def test_hyperbolic_extend_random_sp63():
    W = space_make("sp", 3, 3)
    F = W.field
    gens = isometry_generators(W)
    X0 = subspace_make(F, [unit(6, i) for i in range(3)])
    Y0 = subspace_make(F, [unit(6, i) for i in range(3, 6)])
    rng = random.Random(5)
    for _ in range(5):
        X, Y = X0, Y0
        for g in rng.choices(gens, k=12):
            X, Y = g.apply_subspace(X), g.apply_subspace(Y)
        assert (X & Y).dim == 0
        flag = next(iter(maximal_flags(Y)))
        fr = hyperbolic_extend(W, X, flag)
        check_frame(W, fr)
        assert subspace_make(F, fr.y) == Y


def test_generators_preserve_form():
    W = space_make("sp", 2, 2)
    gens = isometry_generators(W)
    assert len(gens) == 15
    assert all(g.tag == "transvection" and preserves_form(W, g) for g in gens)
    assert preserves_form(W, Isometry(mat_identity(4)))


@pytest.mark.parametrize("omega,q", [(2, 2), (2, 3), (3, 2)])
def test_generated_order_matches_classical(omega, q):
    W = space_make("sp", omega, q)
    pts, perms = point_action(W, isometry_generators(W))
    # the point action has kernel {+-1}
    assert group_order(perms, len(pts)) * (2 if q % 2 else 1) == classical_order(W)


def test_sp42_order_720():
    W = space_make("sp", 2, 2)
    pts, perms = point_action(W, isometry_generators(W))
    assert group_order(perms, len(pts)) == 720


@pytest.mark.parametrize("kind,q", [("sp", 3), ("orthogonal_odd", 3), ("unitary_even", 4)])
def test_generators_preserve_singularity(kind, q):
    W = space_make(kind, 2, q)
    lines = enumerate_singular(W, 2)
    for g in isometry_generators(W):
        for L in lines[:20]:
            assert is_singular(W, g.apply_subspace(L))


def test_json_roundtrip():
    W = space_make("unitary_even", 2, 4)
    obj = json.loads(space_dumps(W))
    assert set(obj) >= {"kind", "omega", "p", "f", "modulus", "gram"}
    assert space_from_json(obj).key() == W.key()
