import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from geodex.algebra import (
    enumerate_subspaces,
    field_arith,
    field_make,
    field_of_order,
    full_space,
    gaussian_binomial,
    is_irreducible,
    mat_identity,
    mat_inv,
    mat_mul,
    mat_rank,
    mat_rref,
    maximal_flags,
    quotient_dim,
    subspace_make,
    subspace_ops,
    zero_subspace,
)
from geodex.errors import AmbientMismatch, BadArgs, DivisionByZero, NotPrime, Reducible, TooLarge


def test_prime_field_gf2():
    F = field_make(2, 1)
    assert list(F.elements()) == [0, 1]
    assert F.add(1, 1) == 0


def test_gf4_modulus_is_lex_smallest():
    # monic quadratics over GF(2): x^2, x^2+1, x^2+x, x^2+x+1; only the last is irreducible
    quads = [(c0, c1, 1) for c1 in range(2) for c0 in range(2)]
    irreducible = [m for m in quads if is_irreducible(m, 2)]
    assert irreducible == [(1, 1, 1)]
    assert field_make(2, 2).modulus == (1, 1, 1)


def test_composite_characteristic_rejected():
    with pytest.raises(NotPrime):
        field_make(4, 1)


def test_reducible_modulus_rejected():
    with pytest.raises(Reducible):
        field_make(2, 2, (1, 0, 1))


def test_gf4_inverse_of_x():
    F = field_make(2, 2)
    x, x1 = 2, 3  # encodings of x and x+1
    assert field_arith(F, x, None, "inv") == x1
    assert F.mul(x, x1) == 1


def test_inverse_of_zero():
    with pytest.raises(DivisionByZero):
        field_make(3, 2).inv(0)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9, 16, 25, 27])
def test_field_axioms(q):
    F = field_of_order(q)
    for a in F.elements():
        assert F.add(a, 0) == a
        assert F.mul(a, 1) == a
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
            assert F.pow(a, q - 1) == 1
    sample = random.Random(q).sample(range(q), min(q, 6))
    for a, b, c in itertools.product(sample, repeat=3):
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))


def test_gf9_frobenius_is_an_involution():
    F = field_make(3, 2)
    for a in F.elements():
        assert F.frobenius(F.frobenius(a)) == a
        assert field_arith(F, a, None, "frobenius", r=2) == a
        assert F.sigma(a) == F.pow(a, 3)


def test_frobenius_is_additive():
    F = field_of_order(8)
    for a, b in itertools.product(F.elements(), repeat=2):
        assert F.frobenius(F.add(a, b)) == F.add(F.frobenius(a), F.frobenius(b))


def test_rref_examples():
    F = field_make(2)
    I = mat_identity(3)
    R, rank, piv = mat_rref(F, I)
    assert R == I and rank == 3 and piv == (0, 1, 2)
    R, rank, _ = mat_rref(F, [(0, 0, 0), (0, 0, 0)])
    assert R == () and rank == 0
    assert mat_rank(F, [(1, 1, 0), (0, 1, 1), (1, 0, 1)]) == 2


def test_mat_inv_roundtrip():
    F = field_of_order(5)
    rng = random.Random(1)
    for _ in range(20):
        A = tuple(tuple(rng.randrange(5) for _ in range(4)) for _ in range(4))
        if mat_rank(F, A) < 4:
            with pytest.raises(DivisionByZero):
                mat_inv(F, A)
            continue
        assert mat_mul(F, A, mat_inv(F, A)) == mat_identity(4)


def test_subspace_ops_small():
    F = field_make(2)
    A = subspace_make(F, [(1, 0)])
    B = subspace_make(F, [(0, 1)])
    assert subspace_ops(A, A, "intersect") == A
    assert subspace_ops(A, B, "sum") == full_space(F, 2)
    assert subspace_ops(A, B, "intersect") == zero_subspace(F, 2)
    assert subspace_ops(A + B, A, "contains")
    assert not subspace_ops(A, B, "contains")
    assert subspace_ops(A + B, A, "quotient_dim") == 1


def test_ambient_mismatch():
    F = field_make(2)
    with pytest.raises(AmbientMismatch):
        subspace_make(F, [(1, 0)]) + subspace_make(F, [(1, 0, 0)])


def test_modular_law_exhaustive_gf2_4():
    F = field_make(2)
    spaces = enumerate_subspaces(F, 4, 2)
    assert len(spaces) == 35
    for A, B in itertools.product(spaces, repeat=2):
        S, I = A + B, A & B
        assert S.dim + I.dim == A.dim + B.dim
        assert I <= A and I <= B and A <= S and B <= S
        assert quotient_dim(A, B) == A.dim - I.dim


@pytest.mark.parametrize("n,m,q,expected", [(5, 0, 3, 1), (4, 2, 2, 35), (3, 1, 2, 7), (3, 2, 3, 13)])
def test_gaussian_values(n, m, q, expected):
    assert gaussian_binomial(n, m, q) == expected


def test_gaussian_bad_args():
    with pytest.raises(BadArgs):
        gaussian_binomial(2, 3, 2)


@pytest.mark.parametrize("q", [2, 3])
def test_gaussian_matches_enumeration(q):
    F = field_of_order(q)
    for n in range(1, 6):
        if q ** n > 300:
            continue
        for m in range(n + 1):
            g = gaussian_binomial(n, m, q)
            assert g == gaussian_binomial(n, n - m, q)
            subs = enumerate_subspaces(F, n, m)
            assert len(subs) == g
            assert len(set(subs)) == g
            assert [S.basis for S in subs] == sorted(S.basis for S in subs)


def test_enumerate_examples():
    F2, F3 = field_make(2), field_make(3)
    assert len(enumerate_subspaces(F2, 3, 1)) == 7
    assert enumerate_subspaces(F2, 3, 3) == [full_space(F2, 3)]
    assert len(enumerate_subspaces(F3, 3, 2)) == 13


def test_enumeration_bound():
    with pytest.raises(TooLarge):
        enumerate_subspaces(field_make(2), 10, 3, bound=512)


def test_maximal_flags_count():
    # maximal flags of GF(2)^3: 7 points, each on 3 lines
    F = field_make(2)
    flags = list(maximal_flags(full_space(F, 3)))
    assert len(flags) == 21
    for fl in flags:
        assert [S.dim for S in fl] == [1, 2, 3]


@settings(max_examples=60, deadline=None)
@given(q=st.sampled_from([2, 3, 4, 5]), seed=st.integers(0, 10 ** 6))
def test_canonicity_under_row_operations(q, seed):
    F = field_of_order(q)
    rng = random.Random(seed)
    n, k = 5, rng.randint(1, 4)
    rows = [tuple(rng.randrange(q) for _ in range(n)) for _ in range(k)]
    S = subspace_make(F, rows, n)
    mixed = list(rows)
    for _ in range(8):
        i, j = rng.randrange(len(mixed)), rng.randrange(len(mixed))
        c = rng.randrange(1, q)
        if i != j:
            mixed[i] = F.axpy(mixed[i], c, mixed[j])
        else:
            mixed[i] = F.scale_row(c, mixed[i])
    rng.shuffle(mixed)
    T = subspace_make(F, mixed, n)
    assert T.basis == S.basis and hash(T) == hash(S)
    R, rank, piv = mat_rref(F, S.basis)
    assert R == S.basis and rank == S.dim
    for r, p in zip(S.basis, piv):
        assert r[p] == 1


@settings(max_examples=60, deadline=None)
@given(q=st.sampled_from([2, 3, 4]), seed=st.integers(0, 10 ** 6))
def test_modular_law_random(q, seed):
    F = field_of_order(q)
    rng = random.Random(seed)
    n = 5

    def rand_space():
        k = rng.randint(0, n)
        return subspace_make(F, [tuple(rng.randrange(q) for _ in range(n)) for _ in range(k)], n) if k else zero_subspace(F, n)

    A, B = rand_space(), rand_space()
    assert (A + B).dim + (A & B).dim == A.dim + B.dim
    for v in (A & B).vectors():
        assert A.contains_vector(v) and B.contains_vector(v)
