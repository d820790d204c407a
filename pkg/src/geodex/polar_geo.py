"""Geodesic calculus for polar Grassmann graphs PG_W(k) with k < omega.

Opposite pairs, the distance formula, normal forms of geodesics, type
vectors and the orbit counts they predict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .algebra import Subspace, subspace_intersect, subspace_make, subspace_sum, enumerate_subspaces_of
from .errors import (
    BadArgs,
    BadType,
    MaximalNotAllowed,
    NotAGeodesic,
    NotDistinct,
    NotSingular,
    OppositeEnds,
)
from .spaces import FormedSpace, is_singular, perp, standard_frame

Row = tuple[int, ...]

CROSS_CHECK_VECTORS = 10_000


@dataclass(frozen=True)
class OppositeReport:
    verdict: bool
    witnesses: tuple[Subspace, Subspace, Subspace, Subspace]
    cross_checked: bool = False

    def as_dict(self) -> dict:
        names = ("X&Y", "Xperp&Y", "X&Yperp", "(X+Y)perp&(X+Y)")
        return {"opposite": self.verdict, "cross_checked": self.cross_checked,
                "dims": {k: w.dim for k, w in zip(names, self.witnesses)}}


@dataclass
class NormalForm:
    case: str  # "F1" or "F2"
    w: list[Row]
    x: list[Row]  # F1: x_1..x_m; F2: x_0..x_m
    y: list[Row]  # y_1..y_m
    pairing: dict[int, int] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.y)

    def as_dict(self) -> dict:
        return {"case": self.case, "w": [list(v) for v in self.w], "x": [list(v) for v in self.x],
                "y": [list(v) for v in self.y], "pairing": {str(k): v for k, v in sorted(self.pairing.items())}}


@lru_cache(maxsize=1 << 16)
def _perp(space: FormedSpace, X: Subspace) -> Subspace:
    return perp(space, X)


@lru_cache(maxsize=1 << 16)
def _singular(space: FormedSpace, X: Subspace) -> bool:
    return is_singular(space, X)


def _check_vertex(space: FormedSpace, X: Subspace, k: int | None = None) -> None:
    if not _singular(space, X):
        raise NotSingular("subspace is not totally singular")
    if X.dim >= space.omega:
        raise MaximalNotAllowed("maximal singular subspaces belong to the dual polar graph")
    if k is not None and X.dim != k:
        raise BadArgs(f"expected a {k}-subspace")


def _condition_i(space: FormedSpace, X: Subspace, Y: Subspace) -> bool:
    xs = [v for v in X.vectors() if not Y.contains_vector(v)]
    for y in Y.vectors():
        if X.contains_vector(y):
            continue
        if not any(space.form(x, y) for x in xs):
            return False
    return True


def is_opposite(space: FormedSpace, X: Subspace, Y: Subspace, cross_check: bool = True) -> OppositeReport:
    _check_vertex(space, X)
    _check_vertex(space, Y, X.dim)
    if X == Y:
        raise NotDistinct("an opposite pair needs distinct vertices")
    S = subspace_sum(X, Y)
    w = (subspace_intersect(X, Y), subspace_intersect(_perp(space, X), Y),
         subspace_intersect(X, _perp(space, Y)), subspace_intersect(perp(space, S), S))
    verdict = w[0] == w[1] == w[2] == w[3]
    checked = False
    if cross_check and space.q ** X.dim <= CROSS_CHECK_VECTORS:
        if _condition_i(space, X, Y) != verdict:
            raise AssertionError("opposite conditions (i) and (iii) disagree")
        checked = True
    return OppositeReport(verdict, w, checked)


def pg_distance(space: FormedSpace, k: int, X: Subspace, Y: Subspace) -> int:
    _check_vertex(space, X, k)
    _check_vertex(space, Y, k)
    if X == Y:
        return 0
    opp = is_opposite(space, X, Y, cross_check=False).verdict
    return k - subspace_intersect(X, Y).dim + (1 if opp else 0)


# -- normal forms -------------------------------------------------------------------

def _span(space: FormedSpace, rows: Sequence[Sequence[int]]) -> Subspace:
    return subspace_make(space.field, [tuple(r) for r in rows], space.n)


def _new_vector(A: Subspace, B: Subspace) -> Row:
    """First basis vector of A lying outside B."""
    for v in A.basis:
        if not B.contains_vector(v):
            return v
    raise NotAGeodesic("subspace chain does not grow")


def _check_path(space: FormedSpace, L: Sequence[Subspace]) -> int:
    if not L:
        raise NotAGeodesic("empty path")
    k = L[0].dim
    for X in L:
        _check_vertex(space, X, k)
    for A, B in zip(L, L[1:]):
        T = subspace_sum(A, B)
        if T.dim != k + 1 or not is_singular(space, T):
            raise NotAGeodesic("consecutive vertices are not adjacent")
    if pg_distance(space, k, L[0], L[-1]) != len(L) - 1:
        raise NotAGeodesic("path is longer than the distance between its ends")
    return k


def _form_matrix(space: FormedSpace, xs: Sequence[Row], ys: Sequence[Row]) -> list[list[int]]:
    return [[space.form(x, y) for y in ys] for x in xs]


def pg_geodesic_normalize(space: FormedSpace, L: Sequence[Subspace]) -> NormalForm:
    """Normal form (F1 for non-opposite ends, F2 for opposite ends) of a geodesic."""
    k = _check_path(space, L)
    F = space.field
    X, Y = L[0], L[-1]
    ell = len(L) - 1
    if ell == 0:
        return NormalForm("F1", list(X.basis), [], [], {})
    W = subspace_intersect(X, Y)
    m = k - W.dim
    if ell == m:
        # X_i ∩ X = <w, x_1..x_(m-i)>,  X_i ∩ Y = <w, y_(m-i+1)..y_m>
        xs = [_new_vector(subspace_intersect(L[m - j], X), subspace_intersect(L[m - j + 1], X))
              for j in range(1, m + 1)]
        ys = [_new_vector(subspace_intersect(L[m - j + 1], Y), subspace_intersect(L[m - j], Y))
              for j in range(1, m + 1)]
        xs, ys, pairing = _reduce_f1(space, xs, ys)
        nf = NormalForm("F1", list(W.basis), xs, ys, pairing)
    else:
        X1 = L[1]
        A = [subspace_intersect(subspace_intersect(L[m - j + 1], X1), X) for j in range(1, m + 1)]
        xs = [_new_vector(A[j], A[j - 1]) for j in range(1, m)]
        xs.append(_new_vector(X, X1))
        x0 = _new_vector(subspace_intersect(L[m], X1), W)
        ys = [_new_vector(subspace_intersect(L[m - j + 2], Y), subspace_intersect(L[m - j + 1], Y))
              for j in range(1, m + 1)]
        ys = _reduce_f2(space, xs, ys)
        nf = NormalForm("F2", list(W.basis), [x0] + xs, ys, {i: i for i in range(1, m + 1)})
    if reconstruct(space, nf) != list(L):
        raise AssertionError("normal form does not reproduce the geodesic")
    return nf


def _reduce_f1(space: FormedSpace, xs: list[Row], ys: list[Row]) -> tuple[list[Row], list[Row], dict[int, int]]:
    """Rook-placement reduction: each x_i changed only by earlier x's, each y_j only by later y's."""
    F = space.field
    m = len(xs)
    xs, ys = list(xs), list(ys)
    pairing: dict[int, int] = {}
    pivots: dict[int, int] = {}  # column -> row
    for i in range(m):
        for col, r in sorted(pivots.items()):
            a = space.form(xs[i], ys[col])
            if a:
                xs[i] = F.axpy(xs[i], F.neg(a), xs[r])
        row = [space.form(xs[i], ys[j]) for j in range(m)]
        nz = [j for j in range(i) if row[j]]
        if not nz:
            continue
        p = nz[-1]
        for j in nz[:-1]:
            # B(x_i, y_j + d y_p) = row[j] + sigma(d) row[p] = 0
            d = space.sigma(F.neg(F.div(row[j], row[p])))
            ys[j] = F.axpy(ys[j], d, ys[p])
        xs[i] = F.scale_row(F.inv(row[p]), xs[i])
        pivots[p] = i
        pairing[i + 1] = p + 1
    M = _form_matrix(space, xs, ys)
    for i in range(m):
        for j in range(m):
            want = 1 if pairing.get(i + 1) == j + 1 else 0
            if M[i][j] != want:
                raise AssertionError("F1 reduction failed")
    return xs, ys, pairing


def _reduce_f2(space: FormedSpace, xs: list[Row], ys: list[Row]) -> list[Row]:
    """Make B(x_i, y_j) the identity pattern, changing each y_i only by later y's (i = m..1)."""
    F = space.field
    m = len(xs)
    ys = list(ys)
    for i in range(m - 1, -1, -1):
        piv = space.form(xs[i], ys[i])
        if not piv:
            raise AssertionError("opposite ends force a nonzero diagonal")
        for j in range(i):
            a = space.form(xs[i], ys[j])
            if a:
                d = space.sigma(F.neg(F.div(a, piv)))
                ys[j] = F.axpy(ys[j], d, ys[i])
        ys[i] = F.scale_row(space.sigma(F.inv(piv)), ys[i])
    M = _form_matrix(space, xs, ys)
    if any(M[i][j] != (1 if i == j else 0) for i in range(m) for j in range(m)):
        raise AssertionError("F2 reduction failed")
    return ys


def reconstruct(space: FormedSpace, nf: NormalForm) -> list[Subspace]:
    m, w = nf.m, nf.w
    if nf.case == "F1":
        return [_span(space, nf.x[:m - i] + nf.y[m - i:] + w) for i in range(m + 1)]
    x0, xs = nf.x[0], nf.x[1:]
    out = [_span(space, xs + w)]
    for i in range(m + 1):
        head = [x0] + xs[:m - i - 1] if i < m else []  # x_0..x_(m-i-1)
        out.append(_span(space, head + nf.y[m - i:] + w))
    return out


# -- types and orbit counts -----------------------------------------------------------

def _quot(space: FormedSpace, A: Subspace, B: Subspace) -> int:
    return subspace_intersect(A, _perp(space, B)).dim - subspace_intersect(A, B).dim


def type_of(space: FormedSpace, L: Sequence[Subspace]) -> tuple[int, ...]:
    k = _check_path(space, L)
    m = len(L) - 1
    if m and m != k - subspace_intersect(L[0], L[-1]).dim:
        raise OppositeEnds("type vectors are defined for non-opposite ends")
    Xm = L[m]
    return tuple(_quot(space, Xm, L[m - i]) for i in range(1, m + 1))


def orbit_fingerprint(space: FormedSpace, L: Sequence[Subspace]) -> tuple[tuple[int, ...], ...]:
    _check_path(space, L)
    return tuple(tuple(_quot(space, A, B) for B in L) for A in L)


def _validate_type(t: Sequence[int]) -> None:
    if not t or t[0] != 1 or any(b - a not in (0, 1) for a, b in zip(t, t[1:])):
        raise BadType(f"{tuple(t)} is not a type vector")


def c_tau(t: Sequence[int]) -> int:
    _validate_type(t)
    return math.prod(t) // math.factorial(t[-1])


def c_tau_stepwise(t: Sequence[int]) -> int:
    """Same count as c_tau, via the run-length product over the levels of t."""
    _validate_type(t)
    out = 1
    for s in range(1, t[-1] + 1):
        run = sum(1 for v in t if v == s)
        out *= s ** (run - 1)
    return out


def enumerate_types(m: int, cap: int) -> list[tuple[int, ...]]:
    if m < 1 or cap < 1:
        raise BadArgs("need m >= 1 and cap >= 1")
    out = [(1,)]
    for _ in range(m - 1):
        out = [t + (t[-1] + s,) for t in out for s in (0, 1) if t[-1] + s <= cap]
    return sorted(out)


def nonopposite_orbit_count(m: int, omega: int, k: int) -> int:
    if not 1 <= m <= k < omega:
        raise BadArgs("need 1 <= m <= k < omega")
    return sum(c_tau(t) for t in enumerate_types(m, omega - k))


def bell(m: int) -> int:
    if m < 1:
        raise BadArgs("bell needs m >= 1")
    row = [1]
    for _ in range(m - 1):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[-1]


def partition_oracle(m: int, max_blocks: int) -> int:
    """Set partitions of an m-set into at most max_blocks blocks, by placing one element at a time."""
    if m < 1:
        raise BadArgs("need m >= 1")

    @lru_cache(maxsize=None)
    def place(i: int, blocks: int) -> int:
        if i == m:
            return 1
        total = blocks * place(i + 1, blocks)
        if blocks < max_blocks:
            total += place(i + 1, blocks + 1)
        return total

    return place(0, 0)


def predicted_orbit_profile(space: FormedSpace, k: int) -> list[int]:
    w = space.omega
    if not 1 <= k < w:
        raise BadArgs("need 1 <= k < omega")
    prof = [nonopposite_orbit_count(1, w, k)]
    prof += [nonopposite_orbit_count(m, w, k) + 1 for m in range(2, k + 1)]
    prof.append(1)
    return prof


# -- the non-distance-regularity witness ------------------------------------------------

def _neighbours(space: FormedSpace, X: Subspace) -> list[Subspace]:
    k = X.dim
    tops = set()
    for P in perp(space, X).points():
        if P <= X:
            continue
        T = subspace_sum(X, P)
        if is_singular(space, T):
            tops.add(T)
    out = set()
    for T in tops:
        out.update(Z for Z in enumerate_subspaces_of(T, k) if Z != X)
    return sorted(out, key=lambda S: S.basis)


@dataclass
class NotDRGCertificate:
    X: Subspace
    X1: Subspace
    X2: Subspace
    Y2: Subspace
    distances: dict[str, int]
    max_from_X1_neighbours: int
    valid: bool

    def as_dict(self) -> dict:
        b = lambda S: [list(r) for r in S.basis]  # noqa: E731
        return {"X": b(self.X), "X1": b(self.X1), "X2": b(self.X2), "Y2": b(self.Y2),
                "distances": self.distances, "max_from_X1_neighbours": self.max_from_X1_neighbours,
                "valid": self.valid}


def not_drg_witness(space: FormedSpace, k: int) -> NotDRGCertificate:
    """X1 and X2 both at distance 2 from X, but only X2 has a neighbour at distance 3."""
    w = space.omega
    if not 1 < k < w:
        raise BadArgs("the witness needs 1 < k < omega")
    fr = standard_frame(space)
    x, y = fr.x, fr.y  # x[i] pairs with y[i]; 0-based
    X = _span(space, x[:k])
    X1 = _span(space, list(x[:k - 1]) + [y[k - 1]])
    X2 = _span(space, list(x[:k - 2]) + [y[k - 1], y[k]])
    Y2 = _span(space, list(x[:k - 2]) + [y[k - 2], y[k - 1]])
    d = {"X-X1": pg_distance(space, k, X, X1), "X-X2": pg_distance(space, k, X, X2),
         "X2-Y2": pg_distance(space, k, X2, Y2), "X-Y2": pg_distance(space, k, X, Y2)}
    far = max(pg_distance(space, k, X, Z) for Z in _neighbours(space, X1))
    valid = d == {"X-X1": 2, "X-X2": 2, "X2-Y2": 1, "X-Y2": 3} and far <= 2
    return NotDRGCertificate(X, X1, X2, Y2, d, far, valid)
