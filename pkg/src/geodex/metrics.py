"""Distances, intersection arrays, geodesic enumeration and the flag-to-geodesic maps."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

import numpy as np

from . import kernels
from .algebra import (
    Subspace,
    enumerate_subspaces_of,
    gaussian_binomial,
    mat_inv,
    maximal_flags,
    projective_points,
    subspace_intersect,
    subspace_make,
    subspace_sum,
    vec_mat,
    zero_subspace,
)
from .errors import BadFlag, Disconnected, NotDistanceRegular, BadArgs
from .families import Graph, distance_power, antipodal_classes, bipartition
from .spaces import perp

BIJECTION_CAP = 10_000_000


@dataclass(frozen=True)
class DistanceTable:
    dist: np.ndarray
    diameter: int


@dataclass(frozen=True)
class IntersectionArray:
    b: tuple[int, ...]
    c: tuple[int, ...]

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.b)) + ";" + ",".join(map(str, self.c)) + "}"


@dataclass(frozen=True)
class NotDRGWitness:
    distance: int
    kind: str  # "c" or "b"
    pair_low: tuple[int, int]
    value_low: int
    pair_high: tuple[int, int]
    value_high: int


def bfs_all(g: Graph) -> DistanceTable:
    D = g.distances()
    if (D < 0).any():
        raise Disconnected(f"{g.name} is disconnected")
    return DistanceTable(D, int(D.max()))


def intersection_array(g: Graph) -> IntersectionArray | NotDRGWitness:
    t = bfs_all(g)
    stats, wit = kernels.ci_bi_extremes(g.indptr, g.indices, t.dist, t.diameter)
    for i in range(t.diameter + 1):
        cmin, cmax, bmin, bmax = (int(x) for x in stats[i])
        if cmin != cmax:
            w = wit[i]
            return NotDRGWitness(i, "c", (int(w[0]), int(w[1])), cmin, (int(w[2]), int(w[3])), cmax)
        if bmin != bmax:
            w = wit[i]
            return NotDRGWitness(i, "b", (int(w[4]), int(w[5])), bmin, (int(w[6]), int(w[7])), bmax)
    b = tuple(int(stats[i, 2]) for i in range(t.diameter))
    c = tuple(int(stats[i, 0]) for i in range(1, t.diameter + 1))
    return IntersectionArray(b, c)


def is_distance_regular(g: Graph) -> bool:
    return isinstance(intersection_array(g), IntersectionArray)


def is_geodesic(g: Graph, path: Sequence[int]) -> bool:
    D = g.distances()
    s = path[0]
    for i in range(1, len(path)):
        if not g.has_edge(int(path[i - 1]), int(path[i])) or D[s, path[i]] != i:
            return False
    return True


def geodesics(g: Graph, x: int, y: int) -> list[tuple[int, ...]]:
    """All geodesics from x to y in lexicographic order (DAG walk towards y)."""
    D = g.distances()
    dy = D[:, y]
    if dy[x] < 0:
        raise Disconnected("no path between the vertices")
    out: list[tuple[int, ...]] = []
    path = [x]

    def walk(u: int) -> None:
        if u == y:
            out.append(tuple(path))
            return
        for w in g.neighbors(u):
            if dy[w] == dy[u] - 1:
                path.append(int(w))
                walk(int(w))
                path.pop()

    walk(x)
    return out


def all_geodesics(g: Graph, length: int, starts: Sequence[int] | None = None) -> np.ndarray:
    """Every geodesic of the given length as rows of an (N, length+1) array."""
    D = g.distances()
    src = np.arange(g.n, dtype=np.int32) if starts is None else np.asarray(starts, dtype=np.int32)
    paths = src.reshape(-1, 1)
    for _ in range(length):
        paths = kernels.extend_geodesics(np.ascontiguousarray(paths), g.indptr, g.indices, D)
    return paths


def all_arcs(g: Graph, s: int, starts: Sequence[int] | None = None) -> np.ndarray:
    src = np.arange(g.n, dtype=np.int32) if starts is None else np.asarray(starts, dtype=np.int32)
    paths = src.reshape(-1, 1)
    for _ in range(s):
        paths = kernels.extend_arcs(np.ascontiguousarray(paths), g.indptr, g.indices)
    return paths


@dataclass
class Census:
    counts: list[int]
    formula: list[int] | None

    @property
    def matches(self) -> bool | None:
        return None if self.formula is None else self.counts == self.formula


def geodesic_census(g: Graph) -> Census:
    """Ordered geodesic counts per length; compared with v*b_0*...*b_(i-1) when distance-regular."""
    t = bfs_all(g)
    counts = [int(x) for x in kernels.path_count_census(g.indptr, g.indices, t.dist, t.diameter)]
    ia = intersection_array(g)
    formula = None
    if isinstance(ia, IntersectionArray):
        formula = [g.n * math.prod(ia.b[:i]) for i in range(t.diameter + 1)]
        if formula != counts:
            raise AssertionError(f"census {counts} differs from the counting formula {formula}")
    return Census(counts, formula)


def antipodal_pair(g: Graph, x: int = 0) -> tuple[int, int]:
    D = g.distances()
    d = int(D[x].max())
    return x, int(np.flatnonzero(D[x] == d)[0])


def antipodal_geodesic_count(g: Graph) -> tuple[int, int]:
    """(brute-force |L_XY| for one antipodal pair, product of the c_i)."""
    ia = intersection_array(g)
    if not isinstance(ia, IntersectionArray):
        raise NotDistanceRegular(f"{g.name} is not distance-regular")
    x, y = antipodal_pair(g)
    return len(geodesics(g, x, y)), math.prod(ia.c)


def primitivity(g: Graph) -> str:
    d = bfs_all(g).diameter
    if all(len(distance_power(g, i)[1]) == 1 for i in range(1, d + 1)):
        return "primitive"
    bip = bipartition(g) is not None and d >= 2
    anti = d >= 2 and antipodal_classes(g) is not None and len(distance_power(g, d)[1]) > 1
    if bip and anti:
        return "both"
    if bip:
        return "bipartite"
    if anti:
        return "antipodal"
    return "imprimitive"


# -- flags ---------------------------------------------------------------------------

def _set_chains(S: Sequence[int], upto: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Chains S_1 < S_2 < ... < S_upto of subsets of S with |S_i| = i."""
    for order in itertools.permutations(sorted(S), upto):
        yield tuple(tuple(sorted(order[:i])) for i in range(1, upto + 1))


def _space_chains(S: Subspace, upto: int) -> Iterator[tuple[Subspace, ...]]:
    """Chains S_1 < ... < S_upto inside S with dim S_i = i."""
    F, n = S.field, S.n

    def extend(chain: tuple[Subspace, ...]) -> Iterator[tuple[Subspace, ...]]:
        if len(chain) == upto:
            yield chain
            return
        top = chain[-1] if chain else zero_subspace(F, n)
        seen = []
        for P in enumerate_subspaces_of(S, 1):
            if P <= top:
                continue
            nxt = subspace_sum(top, P)
            if nxt not in seen:
                seen.append(nxt)
        for nxt in sorted(seen, key=lambda T: T.basis):
            yield from extend(chain + (nxt,))

    yield from extend(())


def _check_set_chain(chain, full, length: int) -> None:
    prev: set = set()
    if len(chain) != length:
        raise BadFlag(f"chain must have {length} members")
    for i, c in enumerate(chain):
        c = set(c)
        if len(c) != i + 1 or not prev <= c or not c <= set(full):
            raise BadFlag("subset chain has the wrong sizes or containments")
        prev = c


def _check_space_chain(chain, full: Subspace, length: int) -> None:
    if len(chain) != length:
        raise BadFlag(f"flag must have {length} members")
    prev = zero_subspace(full.field, full.n)
    for i, c in enumerate(chain):
        if c.dim != i + 1 or not prev <= c or not c <= full:
            raise BadFlag("flag has the wrong dimensions or containments")
        prev = c


def _family(g: Graph) -> str:
    fam = g.meta.get("family", "")
    if fam == "polar_grassmann":
        # only the maximal case carries a flag map
        sp = g.extra.get("space")
        return "dual_polar" if sp is not None and g.labels[0].dim == sp.omega else fam
    return fam


def enumerate_flags(g: Graph, x: int, y: int) -> Iterator[Any]:
    """All flag data for the antipodal pair (x, y), in the format flag_to_geodesic expects."""
    fam = _family(g)
    X, Y = g.labels[x], g.labels[y]
    if fam == "johnson":
        k = len(X)
        for fx in _set_chains(X, k - 1):
            for fy in _set_chains(Y, k - 1):
                yield (fx, fy)
    elif fam == "doubled_odd":
        if len(X) > len(Y):
            X, Y = Y, X
        k = len(Y)
        for fx in _set_chains(X, k - 2):
            for fy in _set_chains(Y, k - 1):
                yield (fx, fy)
    elif fam == "hamming":
        k = len(X)
        for order in itertools.permutations(range(k)):
            yield tuple(tuple(sorted(order[:i])) for i in range(1, k + 1))
    elif fam == "grassmann":
        k = X.dim
        for fx in _space_chains(X, k - 1):
            for fy in _space_chains(Y, k - 1):
                yield (fx, fy)
    elif fam == "doubled_grassmann":
        if X.dim > Y.dim:
            X, Y = Y, X
        k = Y.dim
        for fx in _space_chains(X, k - 2):
            for fy in _space_chains(Y, k - 1):
                yield (fx, fy)
    elif fam == "dual_polar":
        yield from _space_chains(Y, Y.dim)
    elif fam == "bilinear_forms":
        m = g.meta["params"]["m"]
        yield from _bf_flags(g, m)
    elif fam == "incidence_opposites":
        yield from _opposite_flags(g, X, Y)
    else:
        raise BadArgs(f"no flag map for family {fam!r}")


def _bf_flags(g: Graph, m: int) -> Iterator[tuple[tuple[Subspace, ...], tuple[Subspace, ...]]]:
    from .algebra import field_of_order, full_space

    F = field_of_order(g.meta["params"]["q"])
    U = full_space(F, m)
    for fu in _space_chains(U, m - 1):  # U_1 < ... < U_(m-1)

        def comps(i: int, prev: Subspace | None) -> Iterator[tuple[Subspace, ...]]:
            # choose Ubar_i (dim m-i) complementary to U_i, nested Ubar_(m-1) < ... < Ubar_1
            if i == 0:
                yield ()
                return
            Ui = fu[i - 1]
            cands = enumerate_subspaces_of(U, m - i)
            for C in cands:
                if subspace_intersect(C, Ui).dim:
                    continue
                if prev is not None and not prev <= C:
                    continue
                for rest in comps(i - 1, C):
                    yield (C,) + rest

        for ubar in comps(m - 1, None):
            # ubar is (Ubar_(m-1), ..., Ubar_1); store indexed by i
            yield (fu, tuple(reversed(ubar)))


def _opposite_flags(g: Graph, X: Subspace, Y: Subspace) -> Iterator[tuple[Subspace, Subspace]]:
    F, n = X.field, X.n
    from .algebra import enumerate_subspaces

    XY = subspace_sum(X, Y)
    for U in enumerate_subspaces(F, n, n - 2):
        if subspace_intersect(U, XY).dim or all(b[n - 1] == 0 for b in U.basis):
            continue
        for P in enumerate_subspaces_of(U, 1):
            if P.basis[0][n - 1] != 0:
                yield (U, P)


def flag_to_geodesic(g: Graph, x: int, y: int, flag: Any) -> tuple[int, ...]:
    """Image of a flag under the family's explicit map, as a vertex sequence from x to y."""
    fam = _family(g)
    X, Y = g.labels[x], g.labels[y]
    if fam == "johnson":
        k = len(X)
        fx, fy = flag
        _check_set_chain(fx, X, k - 1)
        _check_set_chain(fy, Y, k - 1)
        chainx = (tuple(),) + tuple(fx) + (X,)
        chainy = (tuple(),) + tuple(fy) + (Y,)
        seq = [tuple(sorted(set(chainx[k - i]) | set(chainy[i]))) for i in range(k + 1)]
    elif fam == "doubled_odd":
        swap = len(X) > len(Y)
        A, Bset = (Y, X) if swap else (X, Y)
        k = len(Bset)
        fx, fy = flag
        _check_set_chain(fx, A, k - 2)
        _check_set_chain(fy, Bset, k - 1)
        cx = (tuple(),) + tuple(fx) + (A,)  # cx[i] has size i, i = 0..k-1
        cy = (tuple(),) + tuple(fy) + (Bset,)
        seq = [cx[k - 1]]
        for j in range(1, k):
            seq.append(tuple(sorted(set(cx[k - j]) | set(cy[j]))))
            seq.append(tuple(sorted(set(cx[k - j - 1]) | set(cy[j]))))
        seq.append(Bset)
        if swap:
            seq = seq[::-1]
    elif fam == "hamming":
        k = len(X)
        _check_set_chain(flag, range(k), k)
        seq = [X] + [tuple(Y[j] if j in set(S) else X[j] for j in range(k)) for S in flag]
    elif fam == "grassmann":
        k = X.dim
        fx, fy = flag
        _check_space_chain(fx, X, k - 1)
        _check_space_chain(fy, Y, k - 1)
        z = zero_subspace(X.field, X.n)
        cx, cy = (z,) + tuple(fx) + (X,), (z,) + tuple(fy) + (Y,)
        seq = [subspace_sum(cx[k - i], cy[i]) for i in range(k + 1)]
    elif fam == "doubled_grassmann":
        swap = X.dim > Y.dim
        A, B = (Y, X) if swap else (X, Y)
        k = B.dim
        fx, fy = flag
        _check_space_chain(fx, A, k - 2)
        _check_space_chain(fy, B, k - 1)
        z = zero_subspace(A.field, A.n)
        cx, cy = (z,) + tuple(fx) + (A,), (z,) + tuple(fy) + (B,)
        seq = [cx[k - 1]]
        for j in range(1, k):
            seq.append(subspace_sum(cx[k - j], cy[j]))
            seq.append(subspace_sum(cx[k - j - 1], cy[j]))
        seq.append(B)
        if swap:
            seq = seq[::-1]
    elif fam == "dual_polar":
        space = g.extra["space"]
        w = Y.dim
        _check_space_chain(flag, Y, w)
        z = zero_subspace(X.field, X.n)
        cy = (z,) + tuple(flag)
        # X_i = Y_(w-i)^perp ∩ X
        seq = [subspace_sum(subspace_intersect(perp(space, cy[i]), X), cy[i]) for i in range(w + 1)]
    elif fam == "bilinear_forms":
        seq = _bf_geodesic(g, X, Y, flag)
    elif fam == "incidence_opposites":
        U, P = flag
        n = X.n
        if U.dim != n - 2 or subspace_intersect(U, subspace_sum(X, Y)).dim or not P <= U or P.dim != 1:
            raise BadFlag("U must complement X+Y and contain the point <u>")
        if P.basis[0][n - 1] == 0:
            raise BadFlag("<u> must lie off H")
        seq = [X, subspace_sum(X, U), P, subspace_sum(Y, U), Y]
    else:
        raise BadArgs(f"no flag map for family {fam!r}")
    try:
        path = tuple(g.index(v) for v in seq)
    except KeyError as exc:
        raise BadFlag("flag image leaves the vertex set") from exc
    if not is_geodesic(g, path) or path[-1] != y:
        raise BadFlag("flag image is not a geodesic from x to y")
    return path


def _bf_geodesic(g: Graph, X: tuple, Y: tuple, flag) -> list[tuple]:
    from .algebra import field_of_order

    p = g.meta["params"]
    m, k, q = p["m"], p["k"], p["q"]
    F = field_of_order(q)
    fu, fbar = flag  # fu[i-1] = U_i, fbar[i-1] = Ubar_i
    if len(fu) != m - 1 or len(fbar) != m - 1:
        raise BadFlag("bilinear forms flag has the wrong length")
    Dm = [tuple(F.sub(b, a) for a, b in zip(X[r * k:(r + 1) * k], Y[r * k:(r + 1) * k])) for r in range(m)]
    seq = [X]
    for i in range(m - 1, 0, -1):
        Ui, Ci = fu[i - 1], fbar[i - 1]
        if Ui.dim != i or Ci.dim != m - i or subspace_intersect(Ui, Ci).dim:
            raise BadFlag("Ubar_i must be a complement of U_i")
        Bm = Ui.basis + Ci.basis
        Binv = mat_inv(F, Bm)
        # projection onto Ubar_i along U_i: u -> (u B^-1) diag(0, I) B
        proj = []
        for r in range(m):
            c = list(Binv[r])
            c[:i] = [0] * i
            proj.append(vec_mat(F, c, Bm))
        Yi = [vec_mat(F, proj[r], Dm) for r in range(m)]
        seq.append(tuple(F.add(a, b) for a, b in zip(X, (x for row in Yi for x in row))))
    seq.append(Y)
    return seq


@dataclass
class BijectionReport:
    family: str
    pair: tuple[int, int]
    flags: int
    images_distinct: bool
    all_geodesics: bool
    geodesic_count: int
    product_c: int | None
    passed: bool
    counterexample: Any = None

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "pair": list(self.pair),
            "flags": self.flags,
            "images_distinct": self.images_distinct,
            "all_geodesics": self.all_geodesics,
            "geodesic_count": self.geodesic_count,
            "product_c": self.product_c,
            "passed": self.passed,
            "counterexample": None if self.counterexample is None else str(self.counterexample),
        }


def bijection_check(g: Graph, x: int | None = None, y: int | None = None, cap: int = BIJECTION_CAP) -> BijectionReport:
    if x is None or y is None:
        x, y = antipodal_pair(g, 0 if x is None else x)
    geos = geodesics(g, x, y)
    ia = intersection_array(g)
    prod_c = math.prod(ia.c) if isinstance(ia, IntersectionArray) else None
    images: set = set()
    ok_geo, distinct, count, bad = True, True, 0, None
    for flag in enumerate_flags(g, x, y):
        count += 1
        if count > cap:
            raise BadArgs("flag enumeration exceeds the work cap")
        try:
            path = flag_to_geodesic(g, x, y, flag)
        except BadFlag as exc:
            ok_geo, bad = False, (flag, str(exc))
            continue
        if path in images:
            distinct, bad = False, flag
        images.add(path)
    passed = ok_geo and distinct and count == len(geos) and (prod_c is None or prod_c == count)
    return BijectionReport(_family(g), (x, y), count, distinct, ok_geo, len(geos), prod_c, passed, bad)


# -- closed forms used by the checks ---------------------------------------------------

def q_int(i: int, q: int) -> int:
    """[i 1]_q."""
    return gaussian_binomial(i, 1, q)
