"""Pure numpy/scipy versions of the compiled kernels, with identical signatures and results."""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


def _rows(indptr: np.ndarray) -> np.ndarray:
    return np.repeat(np.arange(len(indptr) - 1, dtype=np.int64), np.diff(indptr))


def bfs_distances(indptr, indices, n, threads=1):
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    D = np.full((n, n), -1, dtype=np.int16)
    A = csr_matrix((np.ones(len(indices), dtype=np.int8), indices, indptr), shape=(n, n))
    # level-synchronous BFS from all sources at once, on dense boolean frontiers
    frontier = np.eye(n, dtype=bool)
    seen = frontier.copy()
    D[frontier] = 0
    level = 0
    while frontier.any():
        level += 1
        nxt = (A @ frontier.T.astype(np.int8)).T > 0
        nxt &= ~seen
        D[nxt] = level
        seen |= nxt
        frontier = nxt
    return D


def path_count_census(indptr, indices, D, diam):
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    n = D.shape[0]
    rows = _rows(indptr)
    L = np.zeros(diam + 1, dtype=np.int64)
    for s in range(n):
        d = D[s]
        sigma = np.zeros(n, dtype=np.int64)
        sigma[s] = 1
        # edges u -> v that go one layer further from s
        fwd = d[indices] == d[rows] + 1
        eu, ev = rows[fwd], indices[fwd]
        lay = d[eu]
        order = np.argsort(lay, kind="stable")
        eu, ev, lay = eu[order], ev[order], lay[order]
        bounds = np.searchsorted(lay, np.arange(d.max() + 2))
        for i in range(d.max()):
            a, b = bounds[i], bounds[i + 1]
            np.add.at(sigma, ev[a:b], sigma[eu[a:b]])
        L += np.bincount(d, weights=sigma, minlength=diam + 1).astype(np.int64)[: diam + 1]
    return L


def ci_bi_extremes(indptr, indices, D, diam):
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    n = D.shape[0]
    rows = _rows(indptr)
    stats = np.empty((diam + 1, 4), dtype=np.int64)
    stats[:, 0] = stats[:, 2] = 1 << 40
    stats[:, 1] = stats[:, 3] = -1
    wit = np.zeros((diam + 1, 8), dtype=np.int64)
    for s in range(n):
        d = D[s].astype(np.int64)
        dn, dt = d[indices], d[rows]
        c = np.bincount(rows, weights=(dn == dt - 1), minlength=n).astype(np.int64)
        b = np.bincount(rows, weights=(dn == dt + 1), minlength=n).astype(np.int64)
        for col, vals, better in ((0, c, np.less), (1, c, np.greater), (2, b, np.less), (3, b, np.greater)):
            for i in range(diam + 1):
                idx = np.flatnonzero(d == i)
                if not len(idx):
                    continue
                v = vals[idx]
                j = int(np.argmin(v)) if col in (0, 2) else int(np.argmax(v))
                if better(v[j], stats[i, col]):
                    stats[i, col] = v[j]
                    wit[i, 2 * col] = s
                    wit[i, 2 * col + 1] = idx[j]
    return stats, wit


def extend_geodesics(paths, indptr, indices, D):
    paths = np.asarray(paths, dtype=np.int32)
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int32)
    N, L = paths.shape
    last = paths[:, -1].astype(np.int64)
    deg = indptr[last + 1] - indptr[last]
    rep = np.repeat(np.arange(N), deg)
    offs = np.arange(int(deg.sum())) - np.repeat(np.cumsum(deg) - deg, deg)
    w = indices[indptr[last][rep] + offs]
    keep = D[paths[rep, 0], w] == L
    return np.hstack([paths[rep[keep]], w[keep, None]]).astype(np.int32)


def extend_arcs(paths, indptr, indices):
    paths = np.asarray(paths, dtype=np.int32)
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int32)
    N, L = paths.shape
    last = paths[:, -1].astype(np.int64)
    deg = indptr[last + 1] - indptr[last]
    rep = np.repeat(np.arange(N), deg)
    offs = np.arange(int(deg.sum())) - np.repeat(np.cumsum(deg) - deg, deg)
    w = indices[indptr[last][rep] + offs]
    keep = np.ones(len(w), dtype=bool) if L < 2 else w != paths[rep, -2]
    return np.hstack([paths[rep[keep]], w[keep, None]]).astype(np.int32)


def orbit_labels(n, images):
    images = np.asarray(images, dtype=np.int64)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    src = np.tile(np.arange(n, dtype=np.int64), images.shape[0])
    dst = images.ravel()
    G = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    _, comp = connected_components(G, directed=True, connection="weak")
    # relabel in order of first occurrence
    _, first = np.unique(comp, return_index=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first)] = np.arange(len(first))
    return rank[comp]
