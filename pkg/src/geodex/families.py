"""Graph families on sets, projective and polar spaces, tuples and matrix spaces.

Every constructor returns ``(Graph, GeneratorSet)``; the generators are
vertex permutations checked to be automorphisms.  The operators at the end
(halved, folded, bipartite double, distance graphs, line graphs) carry the
induced generators along when given a generator set.
"""

from __future__ import annotations

import itertools
import json
import math
import struct
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from .algebra import (
    Field,
    Subspace,
    enumerate_subspaces,
    enumerate_subspaces_of,
    field_of_order,
    gaussian_binomial,
    mat_identity,
    mat_rank,
    nullspace,
    projective_points,
    subspace_make,
    subspace_sum,
)
from .errors import (
    BadArgs,
    BadDistance,
    Disconnected,
    MalformedInput,
    NotAntipodal,
    NotBipartite,
    TooLarge,
)
from .spaces import (
    FormedSpace,
    Isometry,
    enumerate_singular,
    pruned_generators,
    singular_count,
)

MAX_VERTICES = 100_000


# -- core containers ------------------------------------------------------------

@dataclass
class Graph:
    n: int
    labels: list
    indptr: np.ndarray
    indices: np.ndarray
    meta: dict
    extra: dict = field(default_factory=dict)
    _dist: np.ndarray | None = field(default=None, repr=False)
    _index: dict | None = field(default=None, repr=False)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]: self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def valency(self) -> int | None:
        d = self.degrees
        return int(d[0]) if len(d) and (d == d[0]).all() else None

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def index(self, label: Hashable) -> int:
        if self._index is None:
            self._index = {lab: i for i, lab in enumerate(self.labels)}
        return self._index[label]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        j = np.searchsorted(nb, v)
        return bool(j < len(nb) and nb[j] == v)

    def edges(self) -> np.ndarray:
        rows = np.repeat(np.arange(self.n, dtype=np.int32), np.diff(self.indptr))
        mask = rows < self.indices
        return np.stack([rows[mask], self.indices[mask]], axis=1)

    def adjacency_matrix(self) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=bool)
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        A[rows, self.indices] = True
        return A

    def distances(self) -> np.ndarray:
        if self._dist is None:
            self._dist = kernels.bfs_distances(self.indptr, self.indices, self.n, kernels.default_threads())
        return self._dist

    @property
    def diameter(self) -> int:
        D = self.distances()
        if (D < 0).any():
            raise Disconnected("graph is disconnected")
        return int(D.max())

    @property
    def name(self) -> str:
        return self.meta.get("family", "graph")


@dataclass
class GeneratorSet:
    perms: list[np.ndarray]
    provenance: list[str]

    def __len__(self) -> int:
        return len(self.perms)

    def __iter__(self):
        return iter(self.perms)


def graph_from_edges(labels: list, edges: Iterable[tuple[int, int]] | np.ndarray, meta: dict,
                     connected: bool = True, extra: dict | None = None) -> Graph:
    n = len(labels)
    if n > MAX_VERTICES:
        raise TooLarge(f"{n} vertices exceed the bound {MAX_VERTICES}")
    E = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    E = E.reshape(-1, 2)
    E = E[E[:, 0] != E[:, 1]]
    both = np.concatenate([E, E[:, ::-1]])
    keys = np.unique(both[:, 0] * max(n, 1) + both[:, 1])
    rows, cols = keys // max(n, 1), keys % max(n, 1)
    indptr = np.zeros(n + 1, dtype=np.int32)
    np.add.at(indptr, rows + 1, 1)
    indptr = np.cumsum(indptr).astype(np.int32)
    g = Graph(n, list(labels), indptr, cols.astype(np.int32), dict(meta), dict(extra or {}))
    if connected and n > 1:
        A = csr_matrix((np.ones(len(cols), dtype=np.int8), cols, indptr), shape=(n, n))
        ncomp, _ = connected_components(A, directed=False)
        if ncomp != 1:
            raise Disconnected(f"{g.name} construction is disconnected ({ncomp} components)")
    return g


def graph_from_cliques(labels: list, cliques: Iterable[Sequence[int]], meta: dict, **kw) -> Graph:
    """Adjacency = membership in a common clique."""
    edges = []
    for c in cliques:
        c = list(c)
        for a, b in itertools.combinations(c, 2):
            edges.append((a, b))
    return graph_from_edges(labels, np.asarray(edges, dtype=np.int64).reshape(-1, 2), meta, **kw)


def is_automorphism(g: Graph, perm: np.ndarray) -> bool:
    E = g.edges().astype(np.int64)
    if len(E) == 0:
        return True
    n = g.n
    a = np.sort(np.minimum(E[:, 0], E[:, 1]) * n + np.maximum(E[:, 0], E[:, 1]))
    u, v = perm[E[:, 0]].astype(np.int64), perm[E[:, 1]].astype(np.int64)
    b = np.sort(np.minimum(u, v) * n + np.maximum(u, v))
    return bool(np.array_equal(a, b))


def make_generators(g: Graph, perms: Sequence[Sequence[int]], tags: Sequence[str],
                    dedupe: bool = True) -> GeneratorSet:
    out, prov, seen = [], [], set()
    ident = np.arange(g.n, dtype=np.int32)
    for p, t in zip(perms, tags):
        arr = np.asarray(p, dtype=np.int32)
        if not np.array_equal(np.sort(arr), ident):
            raise AssertionError(f"{t} generator is not a permutation")
        if not is_automorphism(g, arr):
            raise AssertionError(f"{t} generator of {g.name} is not an automorphism")
        if np.array_equal(arr, ident):
            continue
        key = arr.tobytes()
        if dedupe and key in seen:
            continue
        seen.add(key)
        out.append(arr)
        prov.append(t)
    return GeneratorSet(out, prov)


def _perm(labels: Sequence, index: dict, fn: Callable[[Any], Any]) -> list[int]:
    return [index[fn(lab)] for lab in labels]


def _check_size(count: int) -> None:
    if count > MAX_VERTICES:
        raise TooLarge(f"{count} vertices exceed the bound {MAX_VERTICES}")


# -- set families ------------------------------------------------------------------

def _transpositions(m: int) -> list[dict]:
    out = []
    for i in range(m - 1):
        t = list(range(m))
        t[i], t[i + 1] = t[i + 1], t[i]
        out.append(t)
    return out


def _act_set(t: Sequence[int], X: tuple) -> tuple:
    return tuple(sorted(t[x] for x in X))


def johnson(n: int, k: int) -> tuple[Graph, GeneratorSet]:
    if not (1 <= k and 2 * k <= n):
        raise BadArgs("Johnson graph needs 1 <= k <= n/2")
    _check_size(math.comb(n, k))
    labels = list(itertools.combinations(range(n), k))
    index = {x: i for i, x in enumerate(labels)}
    groups: dict[tuple, list[int]] = {}
    for i, X in enumerate(labels):
        for drop in range(k):
            groups.setdefault(X[:drop] + X[drop + 1:], []).append(i)
    g = graph_from_cliques(labels, groups.values(), {"family": "johnson", "params": {"n": n, "k": k}})
    ts = _transpositions(n)
    return g, make_generators(g, [_perm(labels, index, lambda X, t=t: _act_set(t, X)) for t in ts],
                              ["transposition"] * len(ts))


def odd(k: int) -> tuple[Graph, GeneratorSet]:
    if k < 2:
        raise BadArgs("odd graph needs k >= 2")
    m = 2 * k - 1
    _check_size(math.comb(m, k - 1))
    labels = list(itertools.combinations(range(m), k - 1))
    index = {x: i for i, x in enumerate(labels)}
    sets = [set(x) for x in labels]
    edges = [(i, j) for i in range(len(labels)) for j in range(i + 1, len(labels)) if not sets[i] & sets[j]]
    g = graph_from_edges(labels, edges, {"family": "odd", "params": {"k": k}})
    ts = _transpositions(m)
    return g, make_generators(g, [_perm(labels, index, lambda X, t=t: _act_set(t, X)) for t in ts],
                              ["transposition"] * len(ts))


def doubled_odd(k: int) -> tuple[Graph, GeneratorSet]:
    if k < 3:
        raise BadArgs("doubled odd graph needs |Delta| = 2k-1 >= 5")
    m = 2 * k - 1
    _check_size(2 * math.comb(m, k))
    labels = list(itertools.combinations(range(m), k - 1)) + list(itertools.combinations(range(m), k))
    index = {x: i for i, x in enumerate(labels)}
    edges = []
    for i, X in enumerate(labels[: math.comb(m, k - 1)]):
        for y in range(m):
            if y not in X:
                edges.append((i, index[tuple(sorted(X + (y,)))]))
    g = graph_from_edges(labels, edges, {"family": "doubled_odd", "params": {"k": k}})
    ts = _transpositions(m)
    perms = [_perm(labels, index, lambda X, t=t: _act_set(t, X)) for t in ts]
    comp = _perm(labels, index, lambda X: tuple(x for x in range(m) if x not in X))
    return g, make_generators(g, perms + [comp], ["transposition"] * len(ts) + ["complement"])


def folded_johnson(k: int) -> tuple[Graph, GeneratorSet]:
    """Folded J(2k, k): k-sets containing 0 stand for {X, complement}."""
    if k < 2:
        raise BadArgs("folded Johnson graph needs k >= 2")
    m = 2 * k
    _check_size(math.comb(m, k) // 2)
    labels = [X for X in itertools.combinations(range(m), k) if 0 in X]
    index = {x: i for i, x in enumerate(labels)}
    sets = [set(x) for x in labels]
    edges = [(i, j) for i in range(len(labels)) for j in range(i + 1, len(labels))
             if len(sets[i] & sets[j]) in (1, k - 1)]
    g = graph_from_edges(labels, edges, {"family": "folded_johnson", "params": {"k": k}})

    def canon(X: tuple) -> tuple:
        return X if 0 in X else tuple(x for x in range(m) if x not in X)

    ts = _transpositions(m)
    perms = [_perm(labels, index, lambda X, t=t: canon(_act_set(t, X))) for t in ts]
    return g, make_generators(g, perms, ["transposition"] * len(ts))


def hamming(k: int, m: int) -> tuple[Graph, GeneratorSet]:
    """H(k, m): words of length k over an m-letter alphabet."""
    if k < 1 or m < 2:
        raise BadArgs("Hamming graph needs k >= 1 and m >= 2")
    _check_size(m ** k)
    labels = list(itertools.product(range(m), repeat=k))
    index = {x: i for i, x in enumerate(labels)}
    cliques = []
    for pos in range(k):
        groups: dict[tuple, list[int]] = {}
        for i, x in enumerate(labels):
            groups.setdefault(x[:pos] + x[pos + 1:], []).append(i)
        cliques.extend(groups.values())
    g = graph_from_cliques(labels, cliques, {"family": "hamming", "params": {"k": k, "m": m}})
    perms, tags = [], []
    for t in _transpositions(m):
        perms.append(_perm(labels, index, lambda x, t=t: (t[x[0]],) + x[1:]))
        tags.append("symbol swap")
    for i in range(k - 1):
        perms.append(_perm(labels, index, lambda x, i=i: x[:i] + (x[i + 1], x[i]) + x[i + 2:]))
        tags.append("coordinate swap")
    return g, make_generators(g, perms, tags)


def cycle(k: int) -> tuple[Graph, GeneratorSet]:
    if k < 3:
        raise BadArgs("cycle needs k >= 3")
    labels = list(range(k))
    g = graph_from_edges(labels, [(i, (i + 1) % k) for i in range(k)], {"family": "cycle", "params": {"k": k}})
    rot = [(i + 1) % k for i in range(k)]
    ref = [(-i) % k for i in range(k)]
    return g, make_generators(g, [rot, ref], ["rotation", "reflection"])


# -- projective families --------------------------------------------------------------

def gl_generators(F: Field, n: int) -> list[Isometry]:
    """Elementary transvections I + a E_ij (a in a prime-field basis), a diagonal map, Frobenius."""
    gens = []
    for i in range(n):
        for j in range(n):
            if i != j:
                for a in F.prime_basis():
                    M = [list(r) for r in mat_identity(n)]
                    M[i][j] = a
                    gens.append(Isometry(tuple(map(tuple, M)), 0, "elementary"))
    if F.q > 2:
        M = [list(r) for r in mat_identity(n)]
        M[0][0] = F.primitive
        gens.append(Isometry(tuple(map(tuple, M)), 0, "diagonal"))
    if F.f > 1:
        gens.append(Isometry(mat_identity(n), 1, "frobenius"))
    return gens


def dot_perp(S: Subspace, J: Sequence[Sequence[int]] | None = None) -> Subspace:
    """Orthogonal complement for the symmetric form x J y^T (dot product by default)."""
    F, n = S.field, S.n
    if S.dim == 0:
        return subspace_make(F, mat_identity(n), n)
    rows = [tuple(F.dot(b, col) for col in zip(*J)) for b in S.basis] if J is not None else list(S.basis)
    return Subspace(F, n, nullspace(F, rows, n))


def _subspace_perms(labels: Sequence[Subspace], index: dict, gens: Sequence[Isometry]) -> list[list[int]]:
    return [_perm(labels, index, g.apply_subspace) for g in gens]


def _down_cliques(labels: Sequence[Subspace], d: int) -> list[list[int]]:
    groups: dict[Subspace, list[int]] = {}
    for i, X in enumerate(labels):
        for H in enumerate_subspaces_of(X, d):
            groups.setdefault(H, []).append(i)
    return list(groups.values())


def grassmann(n: int, k: int, q: int) -> tuple[Graph, GeneratorSet]:
    if not (1 <= k and 2 * k <= n + 1 and k < n):
        raise BadArgs("Grassmann graph needs 1 <= k <= n/2")
    F = field_of_order(q)
    _check_size(gaussian_binomial(n, k, q))
    labels = enumerate_subspaces(F, n, k)
    index = {x: i for i, x in enumerate(labels)}
    g = graph_from_cliques(labels, _down_cliques(labels, k - 1),
                           {"family": "grassmann", "params": {"n": n, "k": k, "q": q}})
    gens = gl_generators(F, n)
    return g, make_generators(g, _subspace_perms(labels, index, gens), [x.tag for x in gens])


def _incidence(F: Field, n: int, lower: int, meta: dict, extra_gens: bool = True) -> tuple[Graph, GeneratorSet]:
    """Containment graph between ``lower``- and ``(n-lower)``-subspaces, with the dot-product duality."""
    upper = n - lower
    _check_size(2 * gaussian_binomial(n, lower, F.q))
    lows = enumerate_subspaces(F, n, lower)
    highs = enumerate_subspaces(F, n, upper)
    labels = lows + highs
    index = {x: i for i, x in enumerate(labels)}
    edges = []
    for j, Y in enumerate(highs):
        for X in enumerate_subspaces_of(Y, lower):
            edges.append((index[X], len(lows) + j))
    g = graph_from_edges(labels, edges, meta)
    gens = gl_generators(F, n)
    perms = _subspace_perms(labels, index, gens)
    tags = [x.tag for x in gens]
    perms.append(_perm(labels, index, dot_perp))
    tags.append("duality")
    return g, make_generators(g, perms, tags)


def doubled_grassmann(k: int, q: int) -> tuple[Graph, GeneratorSet]:
    if k < 2:
        raise BadArgs("doubled Grassmann graph needs k >= 2")
    F = field_of_order(q)
    n = 2 * k - 1
    return _incidence(F, n, k - 1, {"family": "doubled_grassmann", "params": {"k": k, "q": q}})


def incidence_design(n: int, q: int) -> tuple[Graph, GeneratorSet]:
    """Point-hyperplane incidence graph of PG(n-1, q)."""
    if n < 3:
        raise BadArgs("incidence graph needs n >= 3")
    F = field_of_order(q)
    return _incidence(F, n, 1, {"family": "incidence_design", "params": {"n": n, "q": q}})


def _antidiag(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(1 if i + j == n - 1 else 0 for j in range(n)) for i in range(n))


def incidence_opposites(n: int, q: int) -> tuple[Graph, GeneratorSet]:
    """Incidence graph of the points off H and hyperplanes missing w, with w = <e_0>, H = {x_(n-1) = 0}."""
    if n < 3:
        raise BadArgs("opposites graph needs n >= 3")
    F = field_of_order(q)
    _check_size(2 * q ** (n - 1))
    pts = [subspace_make(F, [p], n) for p in projective_points(F, n) if p[n - 1] != 0]
    w = (1,) + (0,) * (n - 1)
    hyps = [H for H in enumerate_subspaces(F, n, n - 1) if not H.contains_vector(w)]
    labels = pts + hyps
    index = {x: i for i, x in enumerate(labels)}
    edges = []
    for j, H in enumerate(hyps):
        for i, P in enumerate(pts):
            if H.contains_vector(P.basis[0]):
                edges.append((i, len(pts) + j))
    g = graph_from_edges(labels, edges, {"family": "incidence_opposites", "params": {"n": n, "q": q}})
    gens = []
    for i in range(1, n):
        for j in range(0, n - 1):
            if i != j:
                for a in F.prime_basis():
                    M = [list(r) for r in mat_identity(n)]
                    M[i][j] = a
                    gens.append(Isometry(tuple(map(tuple, M)), 0, "parabolic elementary"))
    if q > 2:
        for t in range(n):
            M = [list(r) for r in mat_identity(n)]
            M[t][t] = F.primitive
            gens.append(Isometry(tuple(map(tuple, M)), 0, "diagonal"))
    if F.f > 1:
        gens.append(Isometry(mat_identity(n), 1, "frobenius"))
    perms = _subspace_perms(labels, index, gens)
    tags = [x.tag for x in gens]
    J = _antidiag(n)
    perms.append(_perm(labels, index, lambda S: dot_perp(S, J)))
    tags.append("duality")
    return g, make_generators(g, perms, tags)


# -- polar families ---------------------------------------------------------------

def _space_perms(space: FormedSpace, labels, index) -> tuple[list[list[int]], list[str]]:
    gens = pruned_generators(space)
    return _subspace_perms(labels, index, gens), [x.tag for x in gens]


def dual_polar(space: FormedSpace) -> tuple[Graph, GeneratorSet]:
    w = space.omega
    _check_size(singular_count(space, w))
    labels = enumerate_singular(space, w)
    index = {x: i for i, x in enumerate(labels)}
    g = graph_from_cliques(labels, _down_cliques(labels, w - 1),
                           {"family": "dual_polar", "params": {"space": space.to_json()}},
                           extra={"space": space})
    perms, tags = _space_perms(space, labels, index)
    return g, make_generators(g, perms, tags)


def polar_grassmann(space: FormedSpace, k: int) -> tuple[Graph, GeneratorSet]:
    w = space.omega
    if not 1 <= k <= w:
        raise BadArgs(f"polar Grassmann graph needs 1 <= k <= omega = {w}")
    if k == w:
        g, gens = dual_polar(space)
        g.meta = {"family": "polar_grassmann", "params": {"space": space.to_json(), "k": k}}
        return g, gens
    _check_size(singular_count(space, k))
    labels = enumerate_singular(space, k)
    index = {x: i for i, x in enumerate(labels)}
    blocks = enumerate_singular(space, k + 1, max_count=10 * MAX_VERTICES)
    cliques = [[index[X] for X in enumerate_subspaces_of(T, k)] for T in blocks]
    g = graph_from_cliques(labels, cliques, {"family": "polar_grassmann", "params": {"space": space.to_json(), "k": k}},
                           extra={"space": space, "k": k})
    perms, tags = _space_perms(space, labels, index)
    return g, make_generators(g, perms, tags)


def half_dual_polar(space: FormedSpace) -> tuple[Graph, GeneratorSet]:
    if space.kind != "orthogonal_plus":
        raise BadArgs("half dual polar graph needs an orthogonal_plus space")
    g, gens = dual_polar(space)
    h, hgens = halved(g, "plus", gens)
    h.meta = {"family": "half_dual_polar", "params": {"space": space.to_json()}}
    h.extra["space"] = space
    return h, hgens


def symplectic_quadrangle_incidence(q: int) -> tuple[Graph, GeneratorSet]:
    """Point-line incidence graph of the symplectic quadrangle W(q), q even, with its duality."""
    from .spaces import space_make

    if q % 2:
        raise BadArgs("the symplectic quadrangle is self-dual only for even q")
    space = space_make("symplectic", 2, q)
    F = space.field
    pts = enumerate_singular(space, 1)
    lines = enumerate_singular(space, 2)
    labels = pts + lines
    index = {x: i for i, x in enumerate(labels)}
    edges = [(index[P], index[L]) for L in lines for P in enumerate_subspaces_of(L, 1)]
    g = graph_from_edges(labels, edges, {"family": "symplectic_quadrangle_incidence", "params": {"q": q}},
                         extra={"space": space})
    perms, tags = _space_perms(space, labels, index)

    def klein(L: Subspace) -> Subspace:
        u, v = L.basis
        p = lambda i, j: F.sub(F.mul(u[i], v[j]), F.mul(u[j], v[i]))  # noqa: E731
        return subspace_make(F, [(p(0, 1), p(0, 3), p(2, 3), p(1, 2))], 4)

    line_image = {L: klein(L) for L in lines}
    point_image = {}
    for P in pts:
        through = [L for L in lines if L.contains_vector(P.basis[0])]
        rows = [line_image[L].basis[0] for L in through]
        point_image[P] = subspace_make(F, rows, 4)
    duality = _perm(labels, index, lambda S: line_image[S] if S.dim == 2 else point_image[S])
    perms.append(duality)
    tags.append("duality")
    return g, make_generators(g, perms, tags)


# -- forms graphs ---------------------------------------------------------------------

def _rank(F: Field, flat: Sequence[int], rows: int, cols: int) -> int:
    M = [tuple(flat[i * cols:(i + 1) * cols]) for i in range(rows)]
    return mat_rank(F, M)


def _cayley(F: Field, labels: list[tuple], connection: list[tuple], meta: dict) -> Graph:
    index = {x: i for i, x in enumerate(labels)}
    add = F.add
    edges = []
    for i, x in enumerate(labels):
        for s in connection:
            j = index[tuple(add(a, b) for a, b in zip(x, s))]
            if i < j:
                edges.append((i, j))
    return graph_from_edges(labels, edges, meta)


def _matmul_flat(F: Field, A, X, B, m: int, k: int):
    """A (m x m) . X (m x k, flat) . B (k x k), flat result."""
    Xm = [X[i * k:(i + 1) * k] for i in range(m)]
    AX = [[F.dot(A[i], [Xm[t][j] for t in range(m)]) for j in range(k)] for i in range(m)]
    out = [[F.dot(AX[i], [B[t][j] for t in range(k)]) for j in range(k)] for i in range(m)]
    return tuple(x for r in out for x in r)


def _elementary(F: Field, n: int) -> list[tuple]:
    mats = []
    for i in range(n):
        for j in range(n):
            if i != j:
                for a in F.prime_basis():
                    M = [list(r) for r in mat_identity(n)]
                    M[i][j] = a
                    mats.append(tuple(map(tuple, M)))
    if F.q > 2:
        M = [list(r) for r in mat_identity(n)]
        M[0][0] = F.primitive
        mats.append(tuple(map(tuple, M)))
    return mats


def _translations(F: Field, labels: list[tuple], index: dict, basis: list[tuple]) -> list[list[int]]:
    return [_perm(labels, index, lambda x, b=b: tuple(F.add(u, v) for u, v in zip(x, b))) for b in basis]


def bilinear_forms(m: int, k: int, q: int) -> tuple[Graph, GeneratorSet]:
    """m x k matrices over GF(q), adjacent when the difference has rank 1."""
    if not 1 <= m <= k:
        raise BadArgs("bilinear forms graph needs 1 <= m <= k")
    F = field_of_order(q)
    _check_size(q ** (m * k))
    labels = list(itertools.product(range(q), repeat=m * k))
    index = {x: i for i, x in enumerate(labels)}
    conn = [x for x in labels if any(x) and _rank(F, x, m, k) == 1]
    g = _cayley(F, labels, conn, {"family": "bilinear_forms", "params": {"m": m, "k": k, "q": q}})
    basis = []
    for pos in range(m * k):
        for a in F.prime_basis():
            v = [0] * (m * k)
            v[pos] = a
            basis.append(tuple(v))
    perms = _translations(F, labels, index, basis)
    tags = ["translation"] * len(perms)
    Im, Ik = mat_identity(m), mat_identity(k)
    for A in _elementary(F, m) if m > 1 else []:
        perms.append(_perm(labels, index, lambda x, A=A: _matmul_flat(F, A, x, Ik, m, k)))
        tags.append("row operation")
    for B in _elementary(F, k):
        perms.append(_perm(labels, index, lambda x, B=B: _matmul_flat(F, Im, x, B, m, k)))
        tags.append("column operation")
    if F.f > 1:
        perms.append(_perm(labels, index, lambda x: tuple(F.frobenius(a) for a in x)))
        tags.append("frobenius")
    return g, make_generators(g, perms, tags)


def _congruence(F: Field, A, X, k: int, sigma=None):
    """A^T X sigma(A) for a k x k matrix X given flat."""
    At = tuple(zip(*A))
    sA = A if sigma is None else tuple(tuple(sigma(a) for a in r) for r in A)
    return _matmul_flat(F, At, X, sA, k, k)


def alternating_forms(k: int, q: int) -> tuple[Graph, GeneratorSet]:
    """k x k alternating matrices, adjacent when the difference has rank 2."""
    if k < 2:
        raise BadArgs("alternating forms graph needs k >= 2")
    F = field_of_order(q)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    _check_size(q ** len(pairs))

    def full(v: tuple) -> tuple:
        M = [[0] * k for _ in range(k)]
        for (i, j), a in zip(pairs, v):
            M[i][j] = a
            M[j][i] = F.neg(a)
        return tuple(x for r in M for x in r)

    labels = [full(v) for v in itertools.product(range(q), repeat=len(pairs))]
    labels.sort()
    index = {x: i for i, x in enumerate(labels)}
    conn = [x for x in labels if any(x) and _rank(F, x, k, k) == 2]
    g = _cayley(F, labels, conn, {"family": "alternating_forms", "params": {"k": k, "q": q}})
    basis = []
    for t in range(len(pairs)):
        for a in F.prime_basis():
            v = [0] * len(pairs)
            v[t] = a
            basis.append(full(tuple(v)))
    perms = _translations(F, labels, index, basis)
    tags = ["translation"] * len(perms)
    for A in _elementary(F, k):
        perms.append(_perm(labels, index, lambda x, A=A: _congruence(F, A, x, k)))
        tags.append("congruence")
    if F.f > 1:
        perms.append(_perm(labels, index, lambda x: tuple(F.frobenius(a) for a in x)))
        tags.append("frobenius")
    return g, make_generators(g, perms, tags)


def hermitian_forms(k: int, r: int) -> tuple[Graph, GeneratorSet]:
    """k x k Hermitian matrices over GF(r^2), adjacent when the difference has rank 1."""
    if k < 1:
        raise BadArgs("Hermitian forms graph needs k >= 1")
    F = field_of_order(r * r)
    sub = [a for a in range(F.q) if F.sigma(a) == a]
    _check_size(r ** (k * k))
    diag_choices = [sub] * k
    offs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    labels = []
    for d in itertools.product(*diag_choices):
        for o in itertools.product(range(F.q), repeat=len(offs)):
            M = [[0] * k for _ in range(k)]
            for i in range(k):
                M[i][i] = d[i]
            for (i, j), a in zip(offs, o):
                M[i][j] = a
                M[j][i] = F.sigma(a)
            labels.append(tuple(x for row in M for x in row))
    labels.sort()
    index = {x: i for i, x in enumerate(labels)}
    conn = [x for x in labels if any(x) and _rank(F, x, k, k) == 1]
    g = _cayley(F, labels, conn, {"family": "hermitian_forms", "params": {"k": k, "r": r}})
    basis = []
    # the fixed field GF(r) has an additive basis of prime-field elements only when r is prime;
    # use every fixed element on the diagonal and every field element off it
    for i in range(k):
        for a in sub[1:]:
            v = [0] * (k * k)
            v[i * k + i] = a
            basis.append(tuple(v))
    for i, j in offs:
        for a in F.prime_basis():
            v = [0] * (k * k)
            v[i * k + j] = a
            v[j * k + i] = F.sigma(a)
            basis.append(tuple(v))
    perms = _translations(F, labels, index, basis)
    tags = ["translation"] * len(perms)
    for A in _elementary(F, k) if k > 1 else []:
        perms.append(_perm(labels, index, lambda x, A=A: _congruence(F, A, x, k, F.sigma)))
        tags.append("congruence")
    if k == 1 or F.q > 2:
        A = [list(rw) for rw in mat_identity(k)]
        A[0][0] = F.primitive
        A = tuple(map(tuple, A))
        perms.append(_perm(labels, index, lambda x: _congruence(F, A, x, k, F.sigma)))
        tags.append("congruence")
    perms.append(_perm(labels, index, lambda x: tuple(F.frobenius(a) for a in x)))
    tags.append("frobenius")
    return g, make_generators(g, perms, tags)


# -- operators ---------------------------------------------------------------------

def bipartition(g: Graph) -> np.ndarray | None:
    """0/1 colouring with vertex 0 coloured 0, or None if g is not bipartite."""
    D = g.distances()
    col = (D[0] % 2).astype(np.int8)
    E = g.edges()
    if len(E) and (col[E[:, 0]] == col[E[:, 1]]).any():
        return None
    return col


def _restrict(gens: GeneratorSet, keep: np.ndarray, n: int) -> tuple[list[np.ndarray], list[str]]:
    """Generators of the setwise stabilizer of ``keep`` (index <= 2), restricted to it."""
    inside = np.zeros(n, dtype=bool)
    inside[keep] = True
    new_index = -np.ones(n, dtype=np.int64)
    new_index[keep] = np.arange(len(keep))
    stab, swap = [], []
    for p, t in zip(gens.perms, gens.provenance):
        (stab if inside[p[keep]].all() else swap).append((p, t))
    perms = [p for p, _ in stab]
    tags = [t for _, t in stab]
    if swap:
        s0 = swap[0][0]
        s0_inv = np.argsort(s0)
        for p, t in stab:
            perms.append(s0_inv[p[s0]])  # s0 * p * s0^{-1}
            tags.append(t + " (conjugated)")
        for p, t in swap:
            perms.append(s0_inv[p])  # p * s0^{-1}
            tags.append(t + " (composed)")
            perms.append(p[s0])  # s0 * p
            tags.append(t + " (composed)")
    out = []
    for p in perms:
        if not inside[p[keep]].all():
            raise AssertionError("induced generator does not fix the part")
        out.append(new_index[p[keep]].astype(np.int32))
    return out, tags


def halved(g: Graph, part: str = "plus", gens: GeneratorSet | None = None):
    col = bipartition(g)
    if col is None:
        raise NotBipartite(f"{g.name} is not bipartite")
    if g.diameter < 2:
        raise NotBipartite("halved graph needs diameter >= 2")
    want = 0 if part == "plus" else 1
    keep = np.flatnonzero(col == want)
    D = g.distances()
    sub = D[np.ix_(keep, keep)]
    ii, jj = np.nonzero(np.triu(sub == 2, 1))
    h = graph_from_edges([g.labels[i] for i in keep], np.stack([ii, jj], 1),
                         {"family": "halved", "params": {"of": g.meta, "part": part}},
                         extra={"origin": keep.tolist(), **{k: v for k, v in g.extra.items() if k == "space"}})
    if gens is None:
        return h
    perms, tags = _restrict(gens, keep, g.n)
    return h, make_generators(h, perms, tags)


def antipodal_classes(g: Graph) -> list[list[int]] | None:
    D = g.distances()
    d = g.diameter
    classes, seen = [], set()
    for v in range(g.n):
        if v in seen:
            continue
        cls = [v] + np.flatnonzero(D[v] == d).tolist()
        sub = D[np.ix_(cls, cls)]
        if not ((sub == d) | np.eye(len(cls), dtype=bool)).all():
            return None
        classes.append(sorted(cls))
        seen.update(cls)
    return classes


def folded(g: Graph, gens: GeneratorSet | None = None):
    classes = antipodal_classes(g)
    if classes is None or g.diameter < 2:
        raise NotAntipodal(f"{g.name} is not antipodal")
    cls_of = np.empty(g.n, dtype=np.int64)
    for c, members in enumerate(classes):
        cls_of[members] = c
    E = g.edges()
    ce = np.stack([cls_of[E[:, 0]], cls_of[E[:, 1]]], 1)
    h = graph_from_edges([tuple(g.labels[i] for i in c) for c in classes], ce,
                         {"family": "folded", "params": {"of": g.meta}},
                         extra={"classes": classes})
    if gens is None:
        return h
    reps = np.asarray([c[0] for c in classes])
    perms = [cls_of[p[reps]].astype(np.int32) for p in gens.perms]
    return h, make_generators(h, perms, [t + " (on classes)" for t in gens.provenance])


def bipartite_double(g: Graph, gens: GeneratorSet | None = None):
    n = g.n
    E = g.edges().astype(np.int64)
    edges = np.concatenate([np.stack([E[:, 0], E[:, 1] + n], 1), np.stack([E[:, 1], E[:, 0] + n], 1)])
    labels = [(lab, 0) for lab in g.labels] + [(lab, 1) for lab in g.labels]
    h = graph_from_edges(labels, edges, {"family": "bipartite_double", "params": {"of": g.meta}}, connected=False)
    if gens is None:
        return h
    perms = [np.concatenate([p, p + n]) for p in gens.perms]
    swap = np.concatenate([np.arange(n, 2 * n), np.arange(n)])
    return h, make_generators(h, perms + [swap], list(gens.provenance) + ["layer swap"])


def distance_power(g: Graph, i: int) -> tuple[Graph, list[list[int]]]:
    d = g.diameter
    if not 1 <= i <= d:
        raise BadDistance(f"distance must be in 1..{d}")
    D = g.distances()
    ii, jj = np.nonzero(np.triu(D == i, 1))
    h = graph_from_edges(list(g.labels), np.stack([ii, jj], 1),
                         {"family": "distance_power", "params": {"of": g.meta, "i": i}}, connected=False)
    A = csr_matrix((np.ones(len(h.indices), dtype=np.int8), h.indices, h.indptr), shape=(h.n, h.n))
    ncomp, lab = connected_components(A, directed=False)
    comps = [np.flatnonzero(lab == c).tolist() for c in range(ncomp)]
    comps.sort()
    return h, comps


def line_graph(g: Graph, gens: GeneratorSet | None = None):
    E = [tuple(e) for e in g.edges().tolist()]
    index = {e: i for i, e in enumerate(E)}
    inc: dict[int, list[int]] = {}
    for i, (u, v) in enumerate(E):
        inc.setdefault(u, []).append(i)
        inc.setdefault(v, []).append(i)
    h = graph_from_cliques([(g.labels[u], g.labels[v]) for u, v in E], inc.values(),
                           {"family": "line_graph", "params": {"of": g.meta}}, extra={"edges": E})
    if gens is None:
        return h
    perms = []
    for p in gens.perms:
        perms.append([index[tuple(sorted((int(p[u]), int(p[v]))))] for u, v in E])
    return h, make_generators(h, perms, [t + " (on edges)" for t in gens.provenance])


def complete_graph(n: int) -> tuple[Graph, GeneratorSet]:
    g = graph_from_edges(list(range(n)), list(itertools.combinations(range(n), 2)),
                         {"family": "complete", "params": {"n": n}})
    return g, make_generators(g, _transpositions(n), ["transposition"] * (n - 1))


def complete_bipartite(m: int) -> tuple[Graph, GeneratorSet]:
    labels = [(0, i) for i in range(m)] + [(1, i) for i in range(m)]
    g = graph_from_edges(labels, [(i, m + j) for i in range(m) for j in range(m)],
                         {"family": "complete_bipartite", "params": {"m": m}})
    perms = [t + [m + x for x in t] for t in _transpositions(m)]
    perms.append(list(range(m, 2 * m)) + list(range(m)))
    return g, make_generators(g, perms, ["transposition"] * (m - 1) + ["side swap"])


# -- dispatch -----------------------------------------------------------------------

@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: tuple = ()

    @classmethod
    def of(cls, name: str, **params) -> "FamilySpec":
        return cls(name, tuple(sorted(params.items())))

    def kwargs(self) -> dict:
        return dict(self.params)


BUILDERS: dict[str, Callable[..., tuple[Graph, GeneratorSet]]] = {
    "johnson": johnson,
    "odd": odd,
    "doubled_odd": doubled_odd,
    "folded_johnson": folded_johnson,
    "hamming": hamming,
    "grassmann": grassmann,
    "doubled_grassmann": doubled_grassmann,
    "incidence_design": incidence_design,
    "incidence_opposites": incidence_opposites,
    "dual_polar": dual_polar,
    "half_dual_polar": half_dual_polar,
    "polar_grassmann": polar_grassmann,
    "bilinear_forms": bilinear_forms,
    "alternating_forms": alternating_forms,
    "hermitian_forms": hermitian_forms,
    "symplectic_quadrangle_incidence": symplectic_quadrangle_incidence,
    "cycle": cycle,
    "complete": complete_graph,
    "complete_bipartite": complete_bipartite,
}


def build(spec: FamilySpec | str, **params) -> tuple[Graph, GeneratorSet]:
    if isinstance(spec, FamilySpec):
        name, params = spec.name, spec.kwargs()
    else:
        name = spec
    name = name.lower().replace("-", "_")
    if name not in BUILDERS:
        raise BadArgs(f"unknown family {name!r}")
    try:
        return BUILDERS[name](**params)
    except TypeError as exc:
        raise BadArgs(f"bad parameters for {name}: {exc}") from exc


# -- serialization -------------------------------------------------------------------

def label_to_json(label: Any) -> Any:
    if isinstance(label, Subspace):
        return [list(r) for r in label.basis]
    if isinstance(label, tuple):
        return [label_to_json(x) for x in label]
    if isinstance(label, (np.integer,)):
        return int(label)
    return label


def graph_to_json(g: Graph) -> dict:
    return {
        "meta": _jsonable(g.meta),
        "n": g.n,
        "labels": [label_to_json(lab) for lab in g.labels],
        "adjacency": [g.neighbors(v).tolist() for v in range(g.n)],
    }


def _jsonable(obj: Any) -> Any:
    return json.loads(json.dumps(obj, default=lambda o: repr(o), sort_keys=True))


def _tupleize(x: Any) -> Any:
    return tuple(_tupleize(y) for y in x) if isinstance(x, list) else x


def graph_from_json(obj: dict) -> Graph:
    try:
        n = int(obj["n"])
        adj = obj["adjacency"]
        labels = [_tupleize(x) for x in obj.get("labels", list(range(n)))]
        meta = obj.get("meta", {})
        if len(adj) != n or len(labels) != n:
            raise MalformedInput("adjacency/labels length differs from n")
        edges = []
        for u, nb in enumerate(adj):
            for v in nb:
                v = int(v)
                if not 0 <= v < n:
                    raise MalformedInput(f"neighbour {v} out of range")
                edges.append((u, v))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"malformed graph file: {exc}") from exc
    g = graph_from_edges(labels, np.asarray(edges, dtype=np.int64).reshape(-1, 2), meta, connected=False)
    for u, nb in enumerate(adj):
        if sorted(set(int(v) for v in nb)) != g.neighbors(u).tolist():
            raise MalformedInput("adjacency is not symmetric")
    return g


MAGIC = b"GDX1"


def graph_to_bytes(g: Graph) -> bytes:
    meta = json.dumps({"meta": _jsonable(g.meta), "labels": [label_to_json(x) for x in g.labels]},
                      sort_keys=True).encode()
    A = g.adjacency_matrix()
    bits = np.packbits(A, axis=1)
    return MAGIC + struct.pack("<II", g.n, len(meta)) + meta + bits.tobytes()


def graph_from_bytes(data: bytes) -> Graph:
    if data[:4] != MAGIC:
        raise MalformedInput("missing GDX1 header")
    try:
        n, mlen = struct.unpack("<II", data[4:12])
        head = json.loads(data[12:12 + mlen].decode())
        row_bytes = (n + 7) // 8
        bits = np.frombuffer(data[12 + mlen:], dtype=np.uint8)
        if len(bits) != n * row_bytes:
            raise MalformedInput("truncated bit rows")
        A = np.unpackbits(bits.reshape(n, row_bytes), axis=1)[:, :n].astype(bool)
    except (struct.error, ValueError, UnicodeDecodeError) as exc:
        raise MalformedInput(f"malformed GDX1 file: {exc}") from exc
    if not (A == A.T).all() or A.diagonal().any():
        raise MalformedInput("adjacency is not symmetric and loop-free")
    ii, jj = np.nonzero(np.triu(A, 1))
    labels = [_tupleize(x) for x in head.get("labels", list(range(n)))]
    return graph_from_edges(labels, np.stack([ii, jj], 1), head.get("meta", {}), connected=False)


def save_graph(g: Graph, path: str, fmt: str | None = None) -> None:
    fmt = fmt or ("gdx" if str(path).endswith(".gdx") else "json")
    if fmt == "gdx":
        with open(path, "wb") as fh:
            fh.write(graph_to_bytes(g))
    else:
        with open(path, "w") as fh:
            json.dump(graph_to_json(g), fh, sort_keys=True)


def load_graph(path: str) -> Graph:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] == MAGIC:
        return graph_from_bytes(data)
    try:
        return graph_from_json(json.loads(data.decode()))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedInput(f"not a graph file: {exc}") from exc


def isomorphic(g: Graph, h: Graph) -> bool:
    """Brute-force isomorphism test by refinement and backtracking (small graphs only)."""
    if g.n != h.n or g.num_edges != h.num_edges or sorted(g.degrees) != sorted(h.degrees):
        return False
    Dg, Dh = g.distances(), h.distances()
    if (Dg < 0).any() != (Dh < 0).any():
        return False
    sig_g = [tuple(np.bincount(Dg[v][Dg[v] >= 0], minlength=g.n).tolist()) for v in range(g.n)]
    sig_h = [tuple(np.bincount(Dh[v][Dh[v] >= 0], minlength=h.n).tolist()) for v in range(h.n)]
    if sorted(sig_g) != sorted(sig_h):
        return False
    Ag, Ah = g.adjacency_matrix(), h.adjacency_matrix()
    # BFS order from vertex 0 keeps the search connected
    order = np.argsort(Dg[0], kind="stable").tolist()
    mapping = [-1] * g.n
    used = [False] * h.n

    def extend(t: int) -> bool:
        if t == g.n:
            return True
        v = order[t]
        for w in range(h.n):
            if used[w] or sig_h[w] != sig_g[v]:
                continue
            ok = True
            for s in range(t):
                u = order[s]
                if Ag[v, u] != Ah[w, mapping[u]] or Dg[v, u] != Dh[w, mapping[u]]:
                    ok = False
                    break
            if ok:
                mapping[v] = w
                used[w] = True
                if extend(t + 1):
                    return True
                used[w] = False
                mapping[v] = -1
        return False

    return extend(0)
