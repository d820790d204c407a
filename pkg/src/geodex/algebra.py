"""Finite fields, row-reduced matrices and canonical subspaces.

Field elements are plain ints in ``range(q)``; the int encodes the
coefficient vector ``(c_0, ..., c_{f-1})`` of the residue polynomial as
``sum(c_i * p**i)``.  Matrices are tuples of row tuples.  A subspace is
stored by its reduced row-echelon basis, which makes equality and hashing
exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import (
    AmbientMismatch,
    BadArgs,
    DivisionByZero,
    NotPrime,
    Reducible,
    TooLarge,
)

Row = tuple[int, ...]
Matrix = tuple[Row, ...]

MAX_Q = 1 << 16
TABLE_Q = 256
ENUMERATION_BOUND = 1 << 24


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, f)`` with ``q == p**f``, or raise NotPrime."""
    if q < 2:
        raise NotPrime(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    f, r = 0, q
    while r % p == 0:
        r //= p
        f += 1
    if r != 1:
        raise NotPrime(f"{q} is not a prime power")
    return p, f


# -- polynomials over GF(p), coefficient lists low degree first ------------

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _poly_trim(list(a))
    m = _poly_trim(list(m))
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _poly_trim(a)
    return a


def _poly_mulmod(a: Sequence[int], b: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b))
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_mod(out, m, p)


def _monic_polys(p: int, deg: int) -> Iterator[list[int]]:
    for code in range(p ** deg):
        coeffs = []
        for _ in range(deg):
            coeffs.append(code % p)
            code //= p
        yield coeffs + [1]


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(_poly_trim(list(poly))) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for cand in _monic_polys(p, d):
            if not _poly_mod(poly, cand, p):
                return False
    return True


def smallest_irreducible(p: int, f: int) -> tuple[int, ...]:
    for cand in _monic_polys(p, f):
        if is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# -- fields -----------------------------------------------------------------

class Field:
    """GF(p^f) with log/antilog tables (and full add/mul tables for q <= 256)."""

    def __init__(self, p: int, f: int, modulus: Sequence[int]):
        self.p = p
        self.f = f
        self.q = p ** f
        self.modulus = tuple(modulus)
        q = self.q
        self._build_tables()
        if q <= TABLE_Q:
            self.add_table = [[self._add_slow(a, b) for b in range(q)] for a in range(q)]
            self.mul_table = [[self._mul_log(a, b) for b in range(q)] for a in range(q)]
        else:
            self.add_table = None
            self.mul_table = None
        self.neg_table = [self._neg_slow(a) for a in range(q)]
        self.inv_table = [0] + [self._exp[(q - 1 - self._log[a]) % (q - 1)] for a in range(1, q)]
        self._check_group_order()

    # construction helpers
    def _coeffs(self, a: int) -> list[int]:
        out = []
        for _ in range(self.f):
            out.append(a % self.p)
            a //= self.p
        return out

    def _encode(self, coeffs: Sequence[int]) -> int:
        v = 0
        for c in reversed(list(coeffs) + [0] * (self.f - len(coeffs))):
            v = v * self.p + c
        return v

    def _polymul(self, a: int, b: int) -> int:
        if self.f == 1:
            return a * b % self.p
        return self._encode(_poly_mulmod(self._coeffs(a), self._coeffs(b), self.modulus, self.p))

    def _build_tables(self) -> None:
        q = self.q
        if q == 2:
            self.primitive = 1
        else:
            for g in range(2, q):
                x, order = g, 1
                while x != 1:
                    x = self._polymul(x, g)
                    order += 1
                    if order > q - 1:
                        break
                if order == q - 1:
                    self.primitive = g
                    break
        exp = [1] * (2 * (q - 1))
        for i in range(1, 2 * (q - 1)):
            exp[i] = self._polymul(exp[i - 1], self.primitive)
        log = [0] * q
        for i in range(q - 1):
            log[exp[i]] = i
        self._exp, self._log = exp, log

    def _check_group_order(self) -> None:
        # a^(q-1) == 1 by repeated polynomial multiplication, independent of the tables
        q = self.q
        for a in sorted({1, self.primitive, q - 1, (q // 2) or 1}):
            if a == 0:
                continue
            x, e, base = 1, q - 1, a
            while e:
                if e & 1:
                    x = self._polymul(x, base)
                base = self._polymul(base, base)
                e >>= 1
            if x != 1:
                raise Reducible(f"modulus {self.modulus} does not define a field")

    def _add_slow(self, a: int, b: int) -> int:
        if self.f == 1:
            return (a + b) % self.p
        out, mult = 0, 1
        p = self.p
        while a or b:
            out += ((a % p + b % p) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def _neg_slow(self, a: int) -> int:
        if self.f == 1:
            return -a % self.p
        out, mult, p = 0, 1, self.p
        while a:
            out += (-(a % p) % p) * mult
            a //= p
            mult *= p
        return out

    def _mul_log(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    # public arithmetic
    def add(self, a: int, b: int) -> int:
        if self.add_table is not None:
            return self.add_table[a][b]
        return self._add_slow(a, b)

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg_table[b])

    def mul(self, a: int, b: int) -> int:
        if self.mul_table is not None:
            return self.mul_table[a][b]
        return self._mul_log(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return self.inv_table[a]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise DivisionByZero("zero to a negative power")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def frobenius(self, a: int, r: int = 1) -> int:
        return self.pow(a, self.p ** (r % self.f))

    @property
    def has_involution(self) -> bool:
        return self.f % 2 == 0

    def sigma(self, a: int) -> int:
        """The order-2 automorphism a -> a^sqrt(q); only for square q."""
        if self.f % 2:
            raise BadArgs(f"GF({self.q}) has no automorphism of order 2")
        return self.frobenius(a, self.f // 2)

    def is_square(self, a: int) -> bool:
        if a == 0 or self.p == 2:
            return True
        return self._log[a] % 2 == 0

    def nonsquare(self) -> int:
        if self.p == 2:
            raise BadArgs("every element of a field of characteristic 2 is a square")
        return self.primitive

    def elements(self) -> range:
        return range(self.q)

    def prime_basis(self) -> list[int]:
        """Basis 1, x, ..., x^(f-1) of the field over its prime subfield."""
        return [self.p ** i for i in range(self.f)]

    # row helpers used in elimination
    def scale_row(self, c: int, row: Sequence[int]) -> Row:
        if self.mul_table is not None:
            mt = self.mul_table[c]
            return tuple(mt[x] for x in row)
        return tuple(self.mul(c, x) for x in row)

    def axpy(self, a: Sequence[int], c: int, b: Sequence[int]) -> Row:
        """a + c*b elementwise."""
        if c == 0:
            return tuple(a)
        if self.mul_table is not None:
            mt, at = self.mul_table[c], self.add_table
            return tuple(at[x][mt[y]] for x, y in zip(a, b))
        return tuple(self.add(x, self.mul(c, y)) for x, y in zip(a, b))

    def dot(self, a: Sequence[int], b: Sequence[int]) -> int:
        s = 0
        for x, y in zip(a, b):
            if x and y:
                s = self.add(s, self.mul(x, y))
        return s

    def key(self) -> tuple:
        return (self.p, self.f, self.modulus)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"GF({self.q})"


@lru_cache(maxsize=None)
def _field_cached(p: int, f: int, modulus: tuple[int, ...]) -> Field:
    return Field(p, f, modulus)


def field_make(p: int, f: int = 1, modulus: Sequence[int] | None = None) -> Field:
    """Build GF(p^f); the modulus defaults to the lex-smallest monic irreducible."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if f < 1:
        raise BadArgs("extension degree must be >= 1")
    if p ** f > MAX_Q:
        raise TooLarge(f"q = {p}^{f} exceeds {MAX_Q}")
    if f == 1:
        return _field_cached(p, 1, (0, 1))
    if modulus is None:
        modulus = smallest_irreducible(p, f)
    else:
        modulus = tuple(int(c) % p for c in modulus)
        if len(_poly_trim(list(modulus))) != f + 1 or modulus[-1] != 1:
            raise BadArgs(f"modulus must be monic of degree {f}")
        if not is_irreducible(modulus, p):
            raise Reducible(f"modulus {modulus} factors over GF({p})")
    return _field_cached(p, f, tuple(modulus))


def field_of_order(q: int) -> Field:
    p, f = prime_power(q)
    return field_make(p, f)


def field_arith(F: Field, a: int, b: int | None, op: str, r: int = 1) -> int:
    """Dispatch form of the field operations (add, mul, inv, pow, frobenius)."""
    if op == "add":
        return F.add(a, b)
    if op == "mul":
        return F.mul(a, b)
    if op == "inv":
        return F.inv(a)
    if op == "pow":
        return F.pow(a, b)
    if op == "frobenius":
        return F.frobenius(a, r)
    raise BadArgs(f"unknown field operation {op!r}")


# -- matrices ----------------------------------------------------------------

def mat_rref(F: Field, rows: Iterable[Sequence[int]]) -> tuple[Matrix, int, tuple[int, ...]]:
    """Reduced row-echelon form, pivots normalised to 1, zero rows dropped."""
    work = [tuple(r) for r in rows]
    if not work:
        return (), 0, ()
    ncols = len(work[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(work)):
            if work[i][col]:
                piv = i
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        lead = work[r][col]
        if lead != 1:
            work[r] = F.scale_row(F.inv(lead), work[r])
        prow = work[r]
        for i in range(len(work)):
            if i != r:
                c = work[i][col]
                if c:
                    work[i] = F.axpy(work[i], F.neg(c), prow)
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    return tuple(work[:r]), r, tuple(pivots)


def mat_rank(F: Field, rows: Iterable[Sequence[int]]) -> int:
    return mat_rref(F, rows)[1]


def mat_mul(F: Field, A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    cols = list(zip(*B))
    return tuple(tuple(F.dot(row, col) for col in cols) for row in A)


def mat_transpose(A: Sequence[Sequence[int]]) -> Matrix:
    return tuple(zip(*A))


def mat_identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def vec_mat(F: Field, v: Sequence[int], A: Sequence[Sequence[int]]) -> Row:
    """Row vector times matrix."""
    out = [0] * len(A[0])
    for vi, arow in zip(v, A):
        if vi:
            out = list(F.axpy(out, vi, arow))
    return tuple(out)


def nullspace(F: Field, rows: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Basis of {v : rows . v = 0}, as rows, in reduced echelon form."""
    R, rank, pivots = mat_rref(F, rows) if rows else ((), 0, ())
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = F.neg(R[i][fc])
        basis.append(tuple(v))
    return mat_rref(F, basis)[0] if basis else ()


# -- subspaces ---------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    field: Field
    n: int
    basis: Matrix

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ambient_dim(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Subspace(n={self.n}, basis={self.basis})"

    def __le__(self, other: "Subspace") -> bool:
        return subspace_contains(other, self)

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return subspace_intersect(self, other)

    def vectors(self) -> Iterator[Row]:
        """Every vector of the subspace, zero first."""
        F = self.field
        for coeffs in itertools.product(range(F.q), repeat=self.dim):
            v = (0,) * self.n
            for c, b in zip(coeffs, self.basis):
                v = F.axpy(v, c, b)
            yield v

    def points(self) -> list["Subspace"]:
        return enumerate_subspaces_of(self, 1)

    def contains_vector(self, v: Sequence[int]) -> bool:
        if not any(v):
            return True
        return mat_rank(self.field, list(self.basis) + [tuple(v)]) == self.dim


def subspace_make(F: Field, rows: Iterable[Sequence[int]], n: int | None = None) -> Subspace:
    rows = [tuple(r) for r in rows]
    if n is None:
        if not rows:
            raise BadArgs("ambient dimension needed for an empty spanning set")
        n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise AmbientMismatch("row length differs from ambient dimension")
    return Subspace(F, n, mat_rref(F, rows)[0])


def zero_subspace(F: Field, n: int) -> Subspace:
    return Subspace(F, n, ())


def full_space(F: Field, n: int) -> Subspace:
    return Subspace(F, n, mat_identity(n))


def _check_same(A: Subspace, B: Subspace) -> None:
    if A.n != B.n or A.field != B.field:
        raise AmbientMismatch(f"ambient spaces differ: {A.n} vs {B.n}")


def subspace_sum(A: Subspace, B: Subspace) -> Subspace:
    _check_same(A, B)
    return Subspace(A.field, A.n, mat_rref(A.field, A.basis + B.basis)[0])


def subspace_intersect(A: Subspace, B: Subspace) -> Subspace:
    """Zassenhaus: reduce [[A | A], [B | 0]]; rows with empty left half span A ∩ B."""
    _check_same(A, B)
    F, n = A.field, A.n
    if A.dim == 0 or B.dim == 0:
        return zero_subspace(F, n)
    rows = [a + a for a in A.basis] + [b + (0,) * n for b in B.basis]
    R, _, _ = mat_rref(F, rows)
    inter = [r[n:] for r in R if not any(r[:n])]
    return Subspace(F, n, mat_rref(F, inter)[0] if inter else ())


def subspace_contains(A: Subspace, B: Subspace) -> bool:
    """True iff B <= A."""
    _check_same(A, B)
    if B.dim > A.dim:
        return False
    return mat_rank(A.field, A.basis + B.basis) == A.dim


def quotient_dim(A: Subspace, B: Subspace) -> int:
    """dim A - dim(A ∩ B)."""
    return A.dim - subspace_intersect(A, B).dim


def subspace_ops(A: Subspace, B: Subspace, op: str):
    if op == "sum":
        return subspace_sum(A, B)
    if op == "intersect":
        return subspace_intersect(A, B)
    if op == "contains":
        return subspace_contains(A, B)
    if op == "quotient_dim":
        return quotient_dim(A, B)
    raise BadArgs(f"unknown subspace operation {op!r}")


def gaussian_binomial(n: int, m: int, q: int) -> int:
    if m < 0 or n < 0 or m > n:
        raise BadArgs(f"need 0 <= m <= n, got n={n}, m={m}")
    num = den = 1
    for i in range(m):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _rref_cells(F: Field, n: int, k: int) -> Iterator[Matrix]:
    q = F.q
    for pivots in itertools.combinations(range(n), k):
        pset = set(pivots)
        free = [(i, j) for i, pc in enumerate(pivots) for j in range(pc + 1, n) if j not in pset]
        for vals in itertools.product(range(q), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, j), v in zip(free, vals):
                rows[i][j] = v
            yield tuple(tuple(r) for r in rows)


def enumerate_subspaces(F: Field, n: int, k: int, bound: int = ENUMERATION_BOUND) -> list[Subspace]:
    """All k-subspaces of GF(q)^n, ordered lexicographically by basis matrix."""
    if not 0 <= k <= n:
        raise BadArgs(f"need 0 <= k <= n, got n={n}, k={k}")
    if F.q ** n > bound:
        raise TooLarge(f"q^n = {F.q}^{n} exceeds enumeration bound {bound}")
    out = [Subspace(F, n, M) for M in _rref_cells(F, n, k)]
    out.sort(key=lambda S: S.basis)
    return out


def enumerate_subspaces_of(S: Subspace, k: int) -> list[Subspace]:
    """All k-subspaces of S, obtained as coordinate images of GF(q)^dim S."""
    F = S.field
    out = []
    for M in _rref_cells(F, S.dim, k):
        rows = [vec_mat(F, r, S.basis) for r in M]
        out.append(subspace_make(F, rows, S.n))
    out.sort(key=lambda T: T.basis)
    return out


def projective_points(F: Field, n: int, bound: int = ENUMERATION_BOUND) -> list[Row]:
    """Normalised representatives (first nonzero entry 1) of the points of PG(n-1, q)."""
    if F.q ** n > bound:
        raise TooLarge(f"q^n = {F.q}^{n} exceeds enumeration bound {bound}")
    pts = []
    for lead in range(n):
        for tail in itertools.product(range(F.q), repeat=n - lead - 1):
            pts.append((0,) * lead + (1,) + tail)
    pts.sort()
    return pts


def normalise(F: Field, v: Sequence[int]) -> Row:
    for x in v:
        if x:
            return F.scale_row(F.inv(x), v)
    return tuple(v)


def maximal_flags(S: Subspace) -> Iterator[tuple[Subspace, ...]]:
    """Maximal flags S_1 < S_2 < ... < S_d = S, in a deterministic order."""
    F, n = S.field, S.n

    def extend(chain: tuple[Subspace, ...]) -> Iterator[tuple[Subspace, ...]]:
        top = chain[-1] if chain else zero_subspace(F, n)
        if top.dim == S.dim:
            yield chain
            return
        seen = set()
        for pt in S.points():
            if subspace_contains(top, pt):
                continue
            nxt = subspace_sum(top, pt)
            if nxt in seen:
                continue
            seen.add(nxt)
        for nxt in sorted(seen, key=lambda T: T.basis):
            yield from extend(chain + (nxt,))

    yield from extend(())


def mat_inv(F: Field, A: Sequence[Sequence[int]]) -> Matrix:
    """Inverse of a square matrix by reducing [A | I]."""
    n = len(A)
    aug = [tuple(A[i]) + tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    R, rank, pivots = mat_rref(F, aug)
    if rank < n or pivots[n - 1] != n - 1:
        raise DivisionByZero("matrix is singular")
    return tuple(r[n:] for r in R)
