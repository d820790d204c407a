# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled graph kernels: BFS tables, path counts, c/b extremes, path extension, union-find."""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.int32_t i32
ctypedef cnp.int16_t i16
ctypedef cnp.int64_t i64


cdef void _bfs_one(const i32[::1] indptr, const i32[::1] indices, int n, int s,
                   i16[:, ::1] D, int* queue) noexcept nogil:
    cdef int head = 0, tail = 0, u, v, e
    cdef i16 du
    D[s, s] = 0
    queue[tail] = s
    tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        du = D[s, u]
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if D[s, v] < 0:
                D[s, v] = du + 1
                queue[tail] = v
                tail += 1


def bfs_distances(const i32[::1] indptr, const i32[::1] indices, int n, int threads=1):
    out = np.full((n, n), -1, dtype=np.int16)
    cdef i16[:, ::1] D = out
    cdef int s
    cdef int* queue
    for s in prange(n, nogil=True, num_threads=max(threads, 1), schedule="static"):
        queue = <int*> malloc(n * sizeof(int))
        _bfs_one(indptr, indices, n, s, D, queue)
        free(queue)
    return out


def path_count_census(const i32[::1] indptr, const i32[::1] indices, const i16[:, ::1] D, int diam):
    """L[i] = sum over sources s and targets t at distance i of the number of s-t geodesics."""
    cdef int n = D.shape[0]
    cdef int s, t, u, e, head, tail, v
    out = np.zeros(diam + 1, dtype=np.int64)
    cdef i64[::1] L = out
    sig_arr = np.zeros(n, dtype=np.int64)
    q_arr = np.zeros(n, dtype=np.int32)
    cdef i64[::1] sigma = sig_arr
    cdef i32[::1] queue = q_arr
    with nogil:
        for s in range(n):
            for t in range(n):
                sigma[t] = 0
            sigma[s] = 1
            head = 0
            tail = 1
            queue[0] = s
            while head < tail:
                u = queue[head]
                head += 1
                L[D[s, u]] += sigma[u]
                for e in range(indptr[u], indptr[u + 1]):
                    v = indices[e]
                    if D[s, v] == D[s, u] + 1:
                        if sigma[v] == 0:
                            queue[tail] = v
                            tail += 1
                        sigma[v] += sigma[u]
    return out


def ci_bi_extremes(const i32[::1] indptr, const i32[::1] indices, const i16[:, ::1] D, int diam):
    """Per distance i: min/max of c_i and b_i over ordered pairs, with witnessing pairs."""
    cdef int n = D.shape[0]
    cdef int s, t, e, w, c, b, i
    stats_arr = np.empty((diam + 1, 4), dtype=np.int64)
    wit_arr = np.zeros((diam + 1, 8), dtype=np.int64)
    cdef i64[:, ::1] st = stats_arr
    cdef i64[:, ::1] wt = wit_arr
    for i in range(diam + 1):
        st[i, 0] = 1 << 40
        st[i, 1] = -1
        st[i, 2] = 1 << 40
        st[i, 3] = -1
    with nogil:
        for s in range(n):
            for t in range(n):
                i = D[s, t]
                c = 0
                b = 0
                for e in range(indptr[t], indptr[t + 1]):
                    w = indices[e]
                    if D[s, w] == i - 1:
                        c += 1
                    elif D[s, w] == i + 1:
                        b += 1
                if c < st[i, 0]:
                    st[i, 0] = c
                    wt[i, 0] = s
                    wt[i, 1] = t
                if c > st[i, 1]:
                    st[i, 1] = c
                    wt[i, 2] = s
                    wt[i, 3] = t
                if b < st[i, 2]:
                    st[i, 2] = b
                    wt[i, 4] = s
                    wt[i, 5] = t
                if b > st[i, 3]:
                    st[i, 3] = b
                    wt[i, 6] = s
                    wt[i, 7] = t
    return stats_arr, wit_arr


def extend_geodesics(const i32[:, ::1] paths, const i32[::1] indptr, const i32[::1] indices,
                     const i16[:, ::1] D):
    """Append every neighbour w of the last vertex with d(first, w) = current length + 1."""
    cdef Py_ssize_t N = paths.shape[0], L = paths.shape[1], r, j, cnt = 0
    cdef int s, u, e, w
    cdef i16 target = <i16> L
    for r in range(N):
        s = paths[r, 0]
        u = paths[r, L - 1]
        for e in range(indptr[u], indptr[u + 1]):
            if D[s, indices[e]] == target:
                cnt += 1
    out = np.empty((cnt, L + 1), dtype=np.int32)
    cdef i32[:, ::1] o = out
    cnt = 0
    for r in range(N):
        s = paths[r, 0]
        u = paths[r, L - 1]
        for e in range(indptr[u], indptr[u + 1]):
            w = indices[e]
            if D[s, w] == target:
                for j in range(L):
                    o[cnt, j] = paths[r, j]
                o[cnt, L] = w
                cnt += 1
    return out


def extend_arcs(const i32[:, ::1] paths, const i32[::1] indptr, const i32[::1] indices):
    """Append every neighbour of the last vertex except the one just left."""
    cdef Py_ssize_t N = paths.shape[0], L = paths.shape[1], r, j, cnt = 0
    cdef int u, prev, e, w
    for r in range(N):
        u = paths[r, L - 1]
        prev = paths[r, L - 2] if L >= 2 else -1
        for e in range(indptr[u], indptr[u + 1]):
            if indices[e] != prev:
                cnt += 1
    out = np.empty((cnt, L + 1), dtype=np.int32)
    cdef i32[:, ::1] o = out
    cnt = 0
    for r in range(N):
        u = paths[r, L - 1]
        prev = paths[r, L - 2] if L >= 2 else -1
        for e in range(indptr[u], indptr[u + 1]):
            w = indices[e]
            if w != prev:
                for j in range(L):
                    o[cnt, j] = paths[r, j]
                o[cnt, L] = w
                cnt += 1
    return out


cdef inline i64 _find(i64* parent, i64 x) noexcept nogil:
    cdef i64 root = x, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def orbit_labels(i64 n, const i64[:, ::1] images):
    """Components of the Schreier graph i -> images[g, i]; labels are 0.. in order of first element."""
    par_arr = np.arange(n, dtype=np.int64)
    cdef i64[::1] parent = par_arr
    cdef i64* p = &parent[0] if n > 0 else NULL
    cdef Py_ssize_t g, i
    cdef i64 a, b
    with nogil:
        for g in range(images.shape[0]):
            for i in range(n):
                a = _find(p, i)
                b = _find(p, images[g, i])
                if a != b:
                    if a < b:
                        p[b] = a
                    else:
                        p[a] = b
    lab_arr = np.empty(n, dtype=np.int64)
    cdef i64[::1] lab = lab_arr
    rootlab_arr = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] rootlab = rootlab_arr
    cdef i64 nxt = 0, r
    with nogil:
        for i in range(n):
            r = _find(p, i)
            if rootlab[r] < 0:
                rootlab[r] = nxt
                nxt += 1
            lab[i] = rootlab[r]
    return lab_arr
