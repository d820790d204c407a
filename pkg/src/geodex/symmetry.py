"""Permutation groups, orbits on vertex tuples, and transitivity verdicts.

Permutations are int32 numpy arrays of images; products act left to right,
``(p * q)[x] = q[p[x]]``, which in numpy is ``q[p]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import NotPermutation

Perm = np.ndarray


def perm_check(p: Sequence[int], n: int) -> Perm:
    arr = np.asarray(p, dtype=np.int32)
    if arr.shape != (n,) or not np.array_equal(np.sort(arr), np.arange(n, dtype=np.int32)):
        raise NotPermutation(f"not a permutation of {n} points")
    return arr


def perm_mul(p: Perm, q: Perm) -> Perm:
    return q[p]


def perm_inv(p: Perm) -> Perm:
    inv = np.empty_like(p)
    inv[p] = np.arange(len(p), dtype=p.dtype)
    return inv


def is_identity(p: Perm) -> bool:
    return bool(np.array_equal(p, np.arange(len(p), dtype=p.dtype)))


@dataclass
class _Level:
    point: int
    gens: list[Perm]
    orbit: list[int] = field(default_factory=list)
    # inverse transversal: inv_u[x] maps x back to the base point
    inv_u: dict[int, Perm] = field(default_factory=dict)


class BSGS:
    """Base and strong generating set built by the Schreier-Sims algorithm."""

    def __init__(self, n: int, levels: list[_Level]):
        self.n = n
        self._levels = levels

    @property
    def base(self) -> list[int]:
        return [lv.point for lv in self._levels]

    @property
    def strong_generators(self) -> list[Perm]:
        seen, out = set(), []
        for lv in self._levels:
            for g in lv.gens:
                key = g.tobytes()
                if key not in seen:
                    seen.add(key)
                    out.append(g)
        return out

    @property
    def transversal_sizes(self) -> list[int]:
        return [len(lv.orbit) for lv in self._levels]

    @property
    def order(self) -> int:
        return math.prod(self.transversal_sizes)

    def sift(self, g: Perm) -> tuple[Perm, int]:
        return _sift(self._levels, g, 0)

    def contains(self, g: Sequence[int]) -> bool:
        h, lvl = self.sift(np.asarray(g, dtype=np.int32))
        return lvl == len(self._levels) and is_identity(h)

    def stabilizer_generators(self, depth: int = 1) -> list[Perm]:
        """Generators of the pointwise stabilizer of the first ``depth`` base points."""
        if depth >= len(self._levels):
            return []
        return list(self._levels[depth].gens)

    def orbit_of_base(self) -> list[int]:
        return list(self._levels[0].orbit) if self._levels else []


def _orbit(level: _Level, n: int) -> None:
    b = level.point
    ident = np.arange(n, dtype=np.int32)
    level.orbit = [b]
    level.inv_u = {b: ident}
    i = 0
    while i < len(level.orbit):
        x = level.orbit[i]
        ux_inv = level.inv_u[x]
        for s in level.gens:
            y = int(s[x])
            if y not in level.inv_u:
                # u_y = u_x * s, so u_y^{-1} = s^{-1} * u_x^{-1}
                level.inv_u[y] = ux_inv[perm_inv(s)]
                level.orbit.append(y)
        i += 1


def _sift(levels: list[_Level], g: Perm, start: int) -> tuple[Perm, int]:
    for i in range(start, len(levels)):
        lv = levels[i]
        x = int(g[lv.point])
        if x not in lv.inv_u:
            return g, i
        g = lv.inv_u[x][g]
    return g, len(levels)


def _first_moved(g: Perm) -> int:
    moved = np.flatnonzero(g != np.arange(len(g)))
    return int(moved[0])


def schreier_sims(gens: Iterable[Sequence[int]], n: int, base: Sequence[int] = (),
                  known_order: int | None = None, seed: int = 0) -> BSGS:
    """BSGS of the group generated by ``gens`` acting on ``range(n)``.

    With ``known_order`` (an upper bound that is attained, e.g. a classical
    order formula) random products are sifted until the order is reached;
    otherwise all Schreier generators are sifted deterministically.
    """
    gens = [perm_check(g, n) for g in gens]
    gens = [g for g in gens if not is_identity(g)]
    points = list(dict.fromkeys(int(b) for b in base))
    for g in gens:
        if all(g[b] == b for b in points):
            points.append(_first_moved(g))
    levels = [_Level(b, []) for b in points]
    for i, lv in enumerate(levels):
        fixed = points[:i]
        lv.gens = [g for g in gens if all(g[b] == b for b in fixed)]
        _orbit(lv, n)
    if known_order is not None:
        _random_complete(levels, gens, n, known_order, seed)
    else:
        _deterministic_complete(levels, n)
    return BSGS(n, levels)


def _add_residue(levels: list[_Level], h: Perm, start: int, upto: int, n: int) -> None:
    """Add a sift residue to the levels start..upto, opening a new level if needed."""
    if upto == len(levels):
        levels.append(_Level(_first_moved(h), []))
    for j in range(start, upto + 1):
        levels[j].gens.append(h)
        _orbit(levels[j], n)


def _deterministic_complete(levels: list[_Level], n: int) -> None:
    i = len(levels) - 1
    while i >= 0:
        lv = levels[i]
        restarted = False
        for x in list(lv.orbit):
            ux = perm_inv(lv.inv_u[x])
            for s in list(lv.gens):
                y = int(s[x])
                h = lv.inv_u[y][s[ux]]  # u_x * s * u_y^{-1}
                if is_identity(h):
                    continue
                res, j = _sift(levels, h, i + 1)
                if j < len(levels) or not is_identity(res):
                    _add_residue(levels, res, i + 1, j, n)
                    i = j
                    restarted = True
                    break
            if restarted:
                break
        if not restarted:
            i -= 1


def _random_complete(levels: list[_Level], gens: list[Perm], n: int, target: int, seed: int) -> None:
    if not gens:
        return
    rng = np.random.default_rng(seed)
    pool = [g.copy() for g in gens] * max(1, 10 // len(gens) + 1)
    acc = np.arange(n, dtype=np.int32)
    tries = 0
    while math.prod(len(lv.orbit) for lv in levels) < target:
        a, b = rng.choice(len(pool), 2, replace=False) if len(pool) > 1 else (0, 0)
        pool[a] = pool[b][pool[a]] if rng.random() < 0.5 else pool[a][pool[b]]
        acc = pool[a][acc]
        res, j = _sift(levels, acc, 0)
        if j < len(levels) or not is_identity(res):
            _add_residue(levels, res, 0, j, n)
        tries += 1
        if tries > 200000:
            raise RuntimeError("random Schreier-Sims did not reach the expected order")
    if math.prod(len(lv.orbit) for lv in levels) != target:
        raise RuntimeError("group order exceeds the supplied bound")


def group_order(gens: Iterable[Sequence[int]], n: int) -> int:
    return schreier_sims(gens, n).order


def prune_generators(gens: Sequence[Perm], n: int) -> list[int]:
    """Indices of a subset of ``gens`` generating the same group (greedy sifting)."""
    keep: list[int] = []
    bsgs = schreier_sims([], n)
    for idx, g in enumerate(gens):
        if is_identity(np.asarray(g)):
            continue
        if not bsgs.contains(g):
            keep.append(idx)
            bsgs = schreier_sims([gens[k] for k in keep], n, base=bsgs.base)
    return keep


# -- orbits ---------------------------------------------------------------------------

@dataclass
class OrbitReport:
    object_class: str
    count: int
    sizes: list[int]
    representatives: list[tuple[int, ...]]
    total: int = 0

    def as_dict(self) -> dict:
        return {
            "object": self.object_class,
            "orbits": self.count,
            "sizes": self.sizes,
            "representatives": [list(r) for r in self.representatives],
        }


def _encode(rows: np.ndarray, n: int) -> np.ndarray:
    """Injective keys for the rows of an (N, L) vertex array."""
    L = rows.shape[1]
    if L == 0:
        return np.zeros(rows.shape[0], dtype=np.int64)
    if n ** L < 2 ** 62:
        weights = np.array([n ** j for j in range(L)], dtype=np.int64)
        return rows.astype(np.int64) @ weights
    arr = np.ascontiguousarray(rows.astype(np.int32))
    return arr.view(np.dtype((np.void, 4 * L))).ravel()


def _image_indices(tuples: np.ndarray, gens: Sequence[Perm], n: int) -> np.ndarray:
    keys = _encode(tuples, n)
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    out = np.empty((len(gens), len(tuples)), dtype=np.int64)
    for i, g in enumerate(gens):
        ik = _encode(np.asarray(g)[tuples], n)
        pos = np.searchsorted(sk, ik)
        pos = np.minimum(pos, len(sk) - 1)
        if not np.all(sk[pos] == ik):
            raise ValueError("tuple set is not invariant under the generators")
        out[i] = order[pos]
    return out


def orbits_on_tuples(gens: Sequence[Sequence[int]], tuples, n: int | None = None,
                     object_class: str = "tuples") -> OrbitReport:
    """Orbits of the generated group acting coordinatewise on an invariant set of tuples."""
    T = np.asarray(tuples, dtype=np.int32)
    if T.ndim == 1:
        T = T.reshape(-1, 1)
    if len(T) == 0:
        return OrbitReport(object_class, 0, [], [], 0)
    gens = [np.asarray(g, dtype=np.int32) for g in gens]
    if n is None:
        n = len(gens[0]) if gens else int(T.max()) + 1
    labels = np.asarray(kernels.orbit_labels(len(T), _image_indices(T, gens, n) if gens
                                             else np.zeros((0, len(T)), dtype=np.int64)))
    k = int(labels.max()) + 1
    sizes = np.bincount(labels, minlength=k)
    first = np.full(k, -1, dtype=np.int64)
    for idx in range(len(labels) - 1, -1, -1):
        first[labels[idx]] = idx
    reps = [tuple(int(v) for v in T[i]) for i in first]
    return OrbitReport(object_class, k, [int(s) for s in sizes], reps, len(T))


def vertex_orbits(gens: Sequence[Perm], n: int) -> np.ndarray:
    if not gens:
        return np.arange(n)
    return np.asarray(kernels.orbit_labels(n, np.asarray(gens, dtype=np.int64)))


def _stabilizer(gens: Sequence[Perm], n: int, v: int, order: int | None = None) -> tuple[list[Perm], int]:
    bsgs = schreier_sims(gens, n, base=[v], known_order=order)
    return bsgs.stabilizer_generators(1), bsgs.order


@dataclass
class Verdict:
    holds: bool
    reports: list[OrbitReport]
    group_order: int | None = None
    note: str = ""

    @property
    def orbit_counts(self) -> list[int]:
        return [r.count for r in self.reports]


def _vertex_transitive(gens: Sequence[Perm], n: int) -> bool:
    return int(vertex_orbits(gens, n).max()) == 0


def check_distance_transitive(g, gens: Sequence[Perm]) -> Verdict:
    """One orbit of ordered pairs per distance 0..diameter."""
    gens = [np.asarray(p, dtype=np.int32) for p in gens]
    D = g.distances()
    d = int(D.max())
    reports = []
    for i in range(d + 1):
        pairs = np.argwhere(D == i).astype(np.int32)
        reports.append(orbits_on_tuples(gens, pairs, g.n, f"pairs-at-distance-{i}"))
    return Verdict(all(r.count == 1 for r in reports), reports)


def geodesic_orbits(g, gens: Sequence[Perm], length: int, via_stabilizer: bool | None = None,
                    order: int | None = None) -> OrbitReport:
    """Orbits on ordered geodesics of one length.

    For a vertex-transitive group the orbits correspond to the orbits of a
    vertex stabilizer on the geodesics starting at that vertex, which keeps the
    tuple set small; the plain closure over all geodesics is used otherwise.
    """
    from .metrics import all_geodesics

    gens = [np.asarray(p, dtype=np.int32) for p in gens]
    if via_stabilizer is None:
        via_stabilizer = _vertex_transitive(gens, g.n) and g.n > 64
    if via_stabilizer:
        stab, _ = _stabilizer(gens, g.n, 0, order)
        paths = all_geodesics(g, length, starts=[0])
        rep = orbits_on_tuples(stab, paths, g.n, f"geodesics-of-length-{length}")
        rep.sizes = [s * g.n for s in rep.sizes]
        rep.total *= g.n
        return rep
    return orbits_on_tuples(gens, all_geodesics(g, length), g.n, f"geodesics-of-length-{length}")


def check_geodesic_transitive(g, gens: Sequence[Perm], order: int | None = None) -> Verdict:
    """One orbit of geodesics for every length 1..diameter (and vertex-transitivity)."""
    gens = [np.asarray(p, dtype=np.int32) for p in gens]
    d = int(g.distances().max())
    vt = _vertex_transitive(gens, g.n)
    reports = [orbits_on_tuples(gens, np.arange(g.n).reshape(-1, 1), g.n, "geodesics-of-length-0")]
    for i in range(1, d + 1):
        reports.append(geodesic_orbits(g, gens, i, via_stabilizer=vt and g.n > 64, order=order))
    return Verdict(all(r.count == 1 for r in reports), reports)


def orbits_on_arcs(g, gens: Sequence[Perm], s: int) -> OrbitReport:
    from .metrics import all_arcs

    if s < 1:
        from .errors import BadArgs

        raise BadArgs("s-arcs need s >= 1")
    gens = [np.asarray(p, dtype=np.int32) for p in gens]
    return orbits_on_tuples(gens, all_arcs(g, s), g.n, f"{s}-arcs")


def lagrange_ok(report: OrbitReport, order: int) -> bool:
    return all(order % s == 0 for s in report.sizes)


def is_primitive_group(gens: Sequence[Perm], n: int) -> bool:
    """Primitivity of a transitive group: no block system strictly between points and everything.

    For each orbit of the point stabilizer the smallest block containing 0 and a
    representative is computed by union-find closure; the group is primitive iff
    every such block is the whole set.
    """
    gens = [np.asarray(p, dtype=np.int32) for p in gens]
    if n <= 2:
        return True
    if not _vertex_transitive(gens, n):
        return False
    stab, _ = _stabilizer(gens, n, 0)
    labels = vertex_orbits(stab, n)
    reps = {}
    for x in range(1, n):
        reps.setdefault(int(labels[x]), x)
    for x in reps.values():
        if _minimal_block_size(gens, n, x) < n:
            return False
    return True


def _minimal_block_size(gens: Sequence[Perm], n: int, x: int) -> int:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    queue = [(0, x)]
    parent[find(x)] = find(0)
    while queue:
        a, b = queue.pop()
        for g in gens:
            ra, rb = find(int(g[a])), find(int(g[b]))
            if ra != rb:
                parent[rb] = ra
                queue.append((int(g[a]), int(g[b])))
    r0 = find(0)
    return sum(1 for v in range(n) if find(v) == r0)


# -- arithmetic screens ---------------------------------------------------------------

def divisibility_screen(L: int, order: int) -> bool:
    if L <= 0 or order <= 0:
        from .errors import BadArgs

        raise BadArgs("screen needs positive integers")
    return order % L == 0


def census_count(v: int, b: Sequence[int]) -> int:
    return v * math.prod(b)


SPORADIC = (
    {"name": "Gamma1", "v": 352, "b": (50, 49, 36), "c": (1, 14, 50),
     "aut": 2 * 44352000, "aut_text": "2*|HS|"},
    {"name": "Gamma2", "v": 280, "b": (9, 8, 6, 3), "c": (1, 1, 3, 8),
     "aut": 280 * 2**5 * 3**3, "aut_text": "280*2^5*3^3"},
    {"name": "Gamma3", "v": 22880, "b": (280, 243, 144, 10), "c": (1, 8, 90, 280),
     "aut": 2**14 * 3**7 * 5**2 * 7 * 11 * 13, "aut_text": "2^14*3^7*5^2*7*11*13"},
    {"name": "Gamma4", "v": 2**11, "b": (22, 21, 20, 16, 6, 2, 1), "c": (1, 2, 6, 16, 20, 21, 22),
     "aut": 2**19 * 3**2 * 5 * 7 * 11, "aut_text": "2^19*3^2*5*7*11"},
)


def _odd_prime_powers(lo: int, hi: int) -> list[tuple[int, int, int]]:
    from .algebra import prime_power
    from .errors import NotPrime

    out = []
    for q in range(lo | 1, hi + 1, 2):
        try:
            p, f = prime_power(q)
        except NotPrime:
            continue
        out.append((q, p, f))
    return out


def taylor_screen(q: int, f: int) -> dict:
    """Divisibility screens for the Taylor graphs from unitary groups at odd q = p^f."""
    v = 2 * (q**3 + 1)
    k = q**3
    mu = ((q + 1) * (q**2 - 1) // 2, (q - 1) * (q**2 + 1) // 2)
    aut = q**3 * (q**3 + 1) * (q**2 - 1) * 4 * f
    first = (4 * f) % (q + 1) != 0
    second = ((q + 1) * 4 * f) % (q**2 + 1) != 0
    big = [not divisibility_screen(v * k * m, aut) for m in mu]
    return {"q": q, "f": f, "q_plus_1_nmid_4f": first, "q2_plus_1_nmid": second,
            "L3_nmid_order": big, "passed": first and second and all(big)}


def census_screens(q_max: int) -> dict:
    if q_max < 5:
        from .errors import BadArgs

        raise BadArgs("q_max must be at least 5")
    taylor = [taylor_screen(q, f) for q, _, f in _odd_prime_powers(5, q_max)]
    sporadic = []
    for s in SPORADIC:
        L = census_count(s["v"], s["b"])
        sporadic.append({"name": s["name"], "v": s["v"], "b": list(s["b"]), "c": list(s["c"]),
                         "L": L, "aut": s["aut"], "divides": divisibility_screen(L, s["aut"])})
    passed = all(t["passed"] for t in taylor) and not any(s["divides"] for s in sporadic)
    failures = [t for t in taylor if not t["passed"]]
    return {"q_max": q_max, "taylor_checked": len(taylor), "taylor_failures": failures,
            "sporadic": sporadic, "passed": passed}
