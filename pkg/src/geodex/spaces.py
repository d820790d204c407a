"""Formed spaces (symplectic, orthogonal for odd q, unitary) and their isometries.

Coordinates are ordered ``e_1..e_w, f_1..f_w`` followed by the anisotropic
tail (0, 1 or 2 coordinates).  The form is ``B(u, v) = u G sigma(v)^T``,
linear in the first argument.  A matrix ``g`` acts on row vectors by
``v -> v g`` and is an isometry when ``g G sigma(g)^T = G``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .algebra import (
    Field,
    Matrix,
    Row,
    Subspace,
    field_make,
    field_of_order,
    gaussian_binomial,
    mat_identity,
    mat_inv,
    mat_rank,
    nullspace,
    projective_points,
    subspace_contains,
    subspace_intersect,
    subspace_make,
    subspace_sum,
    vec_mat,
    zero_subspace,
    ENUMERATION_BOUND,
)
from .errors import (
    AmbientMismatch,
    BadArgs,
    MalformedInput,
    NotASquare,
    NotOppositeMaximals,
    TooLarge,
    UnsupportedCharacteristic,
)

KINDS = (
    "symplectic",
    "orthogonal_odd",
    "orthogonal_plus",
    "orthogonal_minus",
    "unitary_odd",
    "unitary_even",
)

ALIASES = {
    "sp": "symplectic",
    "o": "orthogonal_odd",
    "o_odd": "orthogonal_odd",
    "o+": "orthogonal_plus",
    "o_plus": "orthogonal_plus",
    "oplus": "orthogonal_plus",
    "o-": "orthogonal_minus",
    "o_minus": "orthogonal_minus",
    "ominus": "orthogonal_minus",
    "u_odd": "unitary_odd",
    "u_even": "unitary_even",
}

TAIL = {
    "symplectic": 0,
    "orthogonal_odd": 1,
    "orthogonal_plus": 0,
    "orthogonal_minus": 2,
    "unitary_odd": 1,
    "unitary_even": 0,
}

# twice the exponent e in the count of maximal singular subspaces prod (q^(i+e) + 1)
TWO_E = {
    "symplectic": 2,
    "orthogonal_odd": 2,
    "orthogonal_plus": 0,
    "orthogonal_minus": 4,
    "unitary_even": 1,
    "unitary_odd": 3,
}


def canonical_kind(kind: str) -> str:
    k = ALIASES.get(kind.lower(), kind.lower())
    if k not in KINDS:
        raise BadArgs(f"unknown space kind {kind!r}")
    return k


@dataclass(frozen=True)
class Isometry:
    """Semilinear map ``v -> frob^r(v) g``; ``r = 0`` for linear isometries."""

    matrix: Matrix
    frob: int = 0
    tag: str = ""

    def apply(self, F: Field, v: Sequence[int]) -> Row:
        if self.frob:
            v = tuple(F.frobenius(x, self.frob) for x in v)
        return vec_mat(F, v, self.matrix)

    def apply_subspace(self, S: Subspace) -> Subspace:
        F = S.field
        return subspace_make(F, [self.apply(F, b) for b in S.basis], S.n)


@dataclass(frozen=True)
class PolarFrame:
    x: tuple[Row, ...]
    y: tuple[Row, ...]


@dataclass(frozen=True, eq=False)
class FormedSpace:
    kind: str
    omega: int
    field: Field
    gram: Matrix
    nu: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.gram)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def unitary(self) -> bool:
        return self.kind.startswith("unitary")

    def key(self) -> tuple:
        return (self.kind, self.omega, self.field.key(), self.gram)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FormedSpace) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"FormedSpace({self.kind}, omega={self.omega}, q={self.q})"

    def sigma(self, a: int) -> int:
        return self.field.sigma(a) if self.unitary else a

    def sigma_vec(self, v: Sequence[int]) -> Row:
        return tuple(self.sigma(a) for a in v) if self.unitary else tuple(v)

    def form(self, u: Sequence[int], v: Sequence[int]) -> int:
        F = self.field
        sv = self.sigma_vec(v)
        return F.dot(vec_mat(F, u, self.gram), sv)

    def quad(self, v: Sequence[int]) -> int:
        """Q(v) = B(v,v)/2 for orthogonal kinds (q odd); B(v,v) otherwise."""
        b = self.form(v, v)
        if self.kind.startswith("orthogonal"):
            return self.field.mul(b, self.field.inv(2 % self.field.p))
        return b

    def is_isotropic(self, v: Sequence[int]) -> bool:
        return self.form(v, v) == 0

    @property
    def frame(self) -> PolarFrame:
        return standard_frame(self)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "omega": self.omega,
            "p": self.field.p,
            "f": self.field.f,
            "modulus": list(self.field.modulus),
            "gram": [list(r) for r in self.gram],
        }


def _standard_gram(kind: str, omega: int, F: Field) -> tuple[Matrix, int | None]:
    n = 2 * omega + TAIL[kind]
    G = [[0] * n for _ in range(n)]
    minus_one = F.neg(1)
    for i in range(omega):
        e, f = i, omega + i
        G[e][f] = 1
        G[f][e] = minus_one if kind == "symplectic" else 1
    nu = None
    base = 2 * omega
    if kind in ("orthogonal_odd", "unitary_odd"):
        G[base][base] = 1
    elif kind == "orthogonal_minus":
        nu = _nonsquare(F)
        G[base][base] = 1
        G[base + 1][base + 1] = F.neg(nu)
    return tuple(tuple(r) for r in G), nu


def _nonsquare(F: Field) -> int:
    # prefer a nonsquare of the prime field so that the Frobenius fixes the Gram matrix
    for a in range(2, F.p):
        if not F.is_square(a):
            return a
    return F.nonsquare()


def space_make(kind: str, omega: int, q: int, modulus: Sequence[int] | None = None) -> FormedSpace:
    """Standard formed space of the given kind, Witt index ``omega`` and order ``q``."""
    kind = canonical_kind(kind)
    if omega < 2:
        raise BadArgs("Witt index must be >= 2")
    from .algebra import prime_power

    p, f = prime_power(q)
    if kind.startswith("orthogonal") and p == 2:
        raise UnsupportedCharacteristic("orthogonal spaces are supported for odd q only")
    if kind.startswith("unitary") and f % 2:
        raise NotASquare(f"unitary spaces need a square q, got {q}")
    F = field_make(p, f, modulus)
    gram, nu = _standard_gram(kind, omega, F)
    meta = {}
    if kind == "orthogonal_minus" and nu is not None and nu >= p:
        meta["semilinear"] = "omitted: the Gram matrix is not fixed by the Frobenius map"
    space = FormedSpace(kind, omega, F, gram, nu, meta)
    _validate(space)
    return space


def space_from_json(obj: dict) -> FormedSpace:
    try:
        kind = canonical_kind(obj["kind"])
        omega = int(obj["omega"])
        p, f = int(obj["p"]), int(obj["f"])
        space = space_make(kind, omega, p ** f, obj.get("modulus") if f > 1 else None)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, BadArgs):
            raise
        raise MalformedInput(f"bad space descriptor: {exc}") from exc
    if "gram" in obj and tuple(tuple(r) for r in obj["gram"]) != space.gram:
        raise MalformedInput("only the standard Gram matrix is supported")
    return space


def space_dumps(space: FormedSpace) -> str:
    return json.dumps(space.to_json(), sort_keys=True)


def _validate(space: FormedSpace) -> None:
    F, G, n = space.field, space.gram, space.n
    if mat_rank(F, G) != n:
        raise BadArgs("Gram matrix is degenerate")
    for i in range(n):
        for j in range(n):
            if space.kind == "symplectic":
                ok = G[i][j] == F.neg(G[j][i]) and G[i][i] == 0
            elif space.unitary:
                ok = G[i][j] == F.sigma(G[j][i])
            else:
                ok = G[i][j] == G[j][i]
            if not ok:
                raise BadArgs("Gram matrix has the wrong symmetry")
    fr = standard_frame(space)
    check_frame(space, fr)


# -- perp and singular subspaces --------------------------------------------------

def perp(space: FormedSpace, U: Subspace) -> Subspace:
    """U^perp = {v : B(v, u) = 0 for all u in U}."""
    if U.n != space.n or U.field != space.field:
        raise AmbientMismatch("subspace does not live in this formed space")
    F = space.field
    if U.dim == 0:
        return subspace_make(F, mat_identity(space.n), space.n)
    gT = tuple(zip(*space.gram))
    # B(v,u) = v . (G sigma(u)^T); the constraint row is G sigma(u)^T read as a row
    rows = [vec_mat(F, space.sigma_vec(u), gT) for u in U.basis]
    return Subspace(F, space.n, nullspace(F, rows, space.n))


def is_singular(space: FormedSpace, U: Subspace) -> bool:
    if U.dim == 0:
        return True
    if not subspace_contains(perp(space, U), U):
        return False
    if space.kind.startswith("orthogonal"):
        return all(space.quad(b) == 0 for b in U.basis)
    return True


def singular_count(space: FormedSpace, k: int) -> int:
    """Closed-form number of singular k-subspaces."""
    w, q = space.omega, space.q
    total = gaussian_binomial(w, k, q)
    two_e = TWO_E[space.kind]
    for i in range(1, k + 1):
        if space.unitary:
            r = int(round(q ** 0.5))
            total *= r ** (2 * (w - i) + two_e) + 1
        else:
            total *= q ** (w - i + two_e // 2) + 1
    return total


def singular_points(space: FormedSpace, bound: int = ENUMERATION_BOUND) -> list[Row]:
    return [v for v in projective_points(space.field, space.n, bound) if space.is_isotropic(v)]


def enumerate_singular(space: FormedSpace, k: int, bound: int = ENUMERATION_BOUND,
                       max_count: int = 100_000) -> list[Subspace]:
    """All singular k-subspaces, sorted by basis matrix, grown one point at a time."""
    if not 1 <= k <= space.omega:
        raise BadArgs(f"need 1 <= k <= omega = {space.omega}")
    expected = singular_count(space, k)
    if expected > max_count:
        raise TooLarge(f"{expected} singular {k}-subspaces exceed the bound {max_count}")
    F, n = space.field, space.n
    pts = singular_points(space, bound)
    current = sorted({subspace_make(F, [v], n) for v in pts}, key=lambda S: S.basis)
    for _ in range(1, k):
        nxt: set[Subspace] = set()
        for S in current:
            P = perp(space, S)
            for v in pts:
                if P.contains_vector(v) and not S.contains_vector(v):
                    nxt.add(subspace_make(F, S.basis + (v,), n))
        current = sorted(nxt, key=lambda S: S.basis)
    if len(current) != expected:
        raise AssertionError(f"found {len(current)} singular {k}-spaces, expected {expected}")
    return current


# -- frames ---------------------------------------------------------------

def standard_frame(space: FormedSpace) -> PolarFrame:
    n, w = space.n, space.omega
    unit = lambda i: tuple(1 if j == i else 0 for j in range(n))  # noqa: E731
    return PolarFrame(tuple(unit(i) for i in range(w)), tuple(unit(w + i) for i in range(w)))


def check_frame(space: FormedSpace, fr: PolarFrame) -> None:
    m = len(fr.x)
    for i in range(m):
        for j in range(m):
            want = 1 if i == j else 0
            if space.form(fr.x[i], fr.x[j]) or space.form(fr.y[i], fr.y[j]):
                raise AssertionError("frame vectors are not isotropic in pairs")
            if space.form(fr.x[i], fr.y[j]) != want:
                raise AssertionError("frame pairing is not the identity")


def hyperbolic_extend(space: FormedSpace, X: Subspace, flag_Y: Sequence[Subspace]) -> PolarFrame:
    """Paired bases of opposite maximals X, Y adapted to a maximal flag of Y.

    Returns x_1..x_w in X and y_1..y_w with Y_i = <y_1..y_i> and
    B(x_i, y_j) = delta_ij, hence X ∩ Y_i^perp = <x_{i+1}, ..., x_w>.
    """
    w = space.omega
    Y = flag_Y[-1] if flag_Y else None
    if Y is None or len(flag_Y) != w or X.dim != w or Y.dim != w:
        raise NotOppositeMaximals("need maximal X and a maximal flag of a maximal Y")
    if not (is_singular(space, X) and is_singular(space, Y)):
        raise NotOppositeMaximals("X and Y must be singular")
    if subspace_intersect(X, Y).dim:
        raise NotOppositeMaximals("X and Y meet nontrivially")
    F = space.field
    ys: list[Row] = []
    prev = zero_subspace(F, space.n)
    for i, Yi in enumerate(flag_Y):
        if Yi.dim != i + 1 or not subspace_contains(Yi, prev):
            raise NotOppositeMaximals("flag of Y is not a maximal chain")
        ys.append(next(b for b in Yi.basis if not prev.contains_vector(b)))
        prev = Yi
    M = tuple(tuple(space.form(xb, y) for y in ys) for xb in X.basis)
    Minv = mat_inv(F, M)
    xs = [vec_mat(F, row, X.basis) for row in Minv]
    fr = PolarFrame(tuple(xs), tuple(ys))
    check_frame(space, fr)
    return fr


# -- isometries ------------------------------------------------------------

def preserves_form(space: FormedSpace, g: Isometry) -> bool:
    """g G sigma(g)^T = frob(G): a semilinear map preserves B up to the field automorphism."""
    F, G = space.field, space.gram
    M = g.matrix
    sM = tuple(tuple(space.sigma(a) for a in row) for row in M)
    lhs = _mm(F, _mm(F, M, G), tuple(zip(*sM)))
    target = tuple(tuple(F.frobenius(a, g.frob) if g.frob else a for a in r) for r in G)
    return lhs == target


def _mm(F: Field, A: Matrix, B: Matrix) -> Matrix:
    cols = list(zip(*B))
    return tuple(tuple(F.dot(r, c) for c in cols) for r in A)


def _outer_update(F: Field, n: int, col: Sequence[int], row: Sequence[int], c: int) -> Matrix:
    """I + c * col row."""
    return tuple(
        tuple(F.add(1 if i == j else 0, F.mul(c, F.mul(col[i], row[j]))) for j in range(n))
        for i in range(n)
    )


def _G_sigma_col(space: FormedSpace, u: Sequence[int]) -> Row:
    # column vector G sigma(u)^T
    F = space.field
    su = space.sigma_vec(u)
    return tuple(F.dot(r, su) for r in space.gram)


def isometry_generators(space: FormedSpace, semilinear: bool = True) -> list[Isometry]:
    """Generators of the isometry group (plus field automorphisms where the Gram allows)."""
    F, n = space.field, space.n
    gens: list[Isometry] = []
    pts = projective_points(F, n)
    if space.kind == "symplectic":
        lams = [1] if F.q == 2 else [1, F.primitive]
        for u in pts:
            col = _G_sigma_col(space, u)
            for lam in lams:
                gens.append(Isometry(_outer_update(F, n, col, u, lam), 0, "transvection"))
    elif space.kind.startswith("orthogonal"):
        two = 2 % F.p
        for v in pts:
            bvv = space.form(v, v)
            if bvv == 0:
                continue
            c = F.neg(F.mul(two, F.inv(bvv)))
            gens.append(Isometry(_outer_update(F, n, _G_sigma_col(space, v), v, c), 0, "reflection"))
    else:
        trace_zero = [a for a in range(1, F.q) if F.add(a, F.sigma(a)) == 0]
        for u in pts:
            if not space.is_isotropic(u):
                continue
            col = _G_sigma_col(space, u)
            for a in trace_zero:
                gens.append(Isometry(_outer_update(F, n, col, u, a), 0, "unitary transvection"))
        mu = F.primitive
        D = [list(r) for r in mat_identity(n)]
        D[0][0] = mu
        D[space.omega][space.omega] = F.inv(F.sigma(mu))
        gens.append(Isometry(tuple(tuple(r) for r in D), 0, "diagonal"))
        if space.kind == "unitary_odd":
            r = int(round(F.q ** 0.5))
            lam = F.pow(F.primitive, r - 1)  # norm 1
            D = [list(r_) for r_ in mat_identity(n)]
            D[2 * space.omega][2 * space.omega] = lam
            gens.append(Isometry(tuple(tuple(r_) for r_ in D), 0, "diagonal"))
    if semilinear and F.f > 1 and all(a < F.p for row in space.gram for a in row):
        gens.append(Isometry(mat_identity(n), 1, "frobenius"))
    for g in gens:
        if not preserves_form(space, g):
            raise AssertionError(f"generator {g.tag} does not preserve the form")
    return gens


def point_action(space: FormedSpace, gens: Sequence[Isometry]) -> tuple[list[Row], list[list[int]]]:
    """Permutations induced by ``gens`` on the projective points of the ambient space."""
    F, n = space.field, space.n
    pts = projective_points(F, n)
    index = {p: i for i, p in enumerate(pts)}
    from .algebra import normalise

    perms = [[index[normalise(F, g.apply(F, p))] for p in pts] for g in gens]
    return pts, perms


def pruned_generators(space: FormedSpace, semilinear: bool = True) -> list[Isometry]:
    """A generating subset of :func:`isometry_generators`, redundant maps removed by sifting."""
    from .symmetry import prune_generators
    import numpy as np

    gens = isometry_generators(space, semilinear)
    pts, perms = point_action(space, gens)
    keep = prune_generators([np.asarray(p, dtype=np.int32) for p in perms], len(pts))
    return [gens[i] for i in keep]


def classical_order(space: FormedSpace) -> int:
    """Order of the full isometry group of the form (linear maps only)."""
    q, w, kind = space.q, space.omega, space.kind
    prod = 1
    if kind == "symplectic":
        for i in range(1, w + 1):
            prod *= q ** (2 * i) - 1
        return q ** (w * w) * prod
    if kind == "orthogonal_odd":
        for i in range(1, w + 1):
            prod *= q ** (2 * i) - 1
        return 2 * q ** (w * w) * prod
    if kind == "orthogonal_plus":
        for i in range(1, w):
            prod *= q ** (2 * i) - 1
        return 2 * q ** (w * (w - 1)) * (q ** w - 1) * prod
    if kind == "orthogonal_minus":
        m = w + 1
        for i in range(1, m):
            prod *= q ** (2 * i) - 1
        return 2 * q ** (m * (m - 1)) * (q ** m + 1) * prod
    r = int(round(q ** 0.5))
    n = space.n
    for i in range(1, n + 1):
        prod *= r ** i - (-1) ** i
    return r ** (n * (n - 1) // 2) * prod


def image_of(space: FormedSpace, g: Isometry, U: Subspace) -> Subspace:
    return g.apply_subspace(U)


def space_sum(A: Subspace, B: Subspace) -> Subspace:
    return subspace_sum(A, B)
