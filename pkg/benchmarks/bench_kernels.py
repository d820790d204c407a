"""Compare the compiled kernels with the numpy/scipy fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Each kernel runs on the same inputs under both backends; outputs are
checked for equality before timings are reported.
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from geodex import kernels
from geodex.families import build
from geodex.spaces import space_make

CASES = [
    ("johnson(10,4)", lambda: build("johnson", n=10, k=4)[0]),
    ("grassmann(5,2,2)", lambda: build("grassmann", n=5, k=2, q=2)[0]),
    ("pg(sp6,2,k=2)", lambda: build("polar_grassmann", space=space_make("symplectic", 3, 2), k=2)[0]),
    ("hamming(6,3)", lambda: build("hamming", k=6, m=3)[0]),
]


def _run(g, name: str):
    ip, ix, n = g.indptr, g.indices, g.n
    if name == "bfs_distances":
        return kernels.bfs_distances(ip, ix, n, 1)
    D = kernels.bfs_distances(ip, ix, n, 1)
    d = int(D.max())
    if name == "path_count_census":
        return kernels.path_count_census(ip, ix, D, d)
    if name == "ci_bi_extremes":
        return kernels.ci_bi_extremes(ip, ix, D, d)[0]
    if name == "extend_geodesics":
        p = np.arange(n, dtype=np.int32).reshape(-1, 1)
        for _ in range(min(d, 2)):
            p = kernels.extend_geodesics(p, ip, ix, D)
        return p
    raise ValueError(name)


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json")
    args = ap.parse_args()
    backends = kernels.available_backends()
    rows = []
    for label, make in CASES:
        g = make()
        for kname in ("bfs_distances", "path_count_census", "ci_bi_extremes", "extend_geodesics"):
            row = {"graph": label, "n": g.n, "kernel": kname}
            ref = None
            for b in backends:
                kernels.use_backend(b)
                out = _run(g, kname)
                if ref is None:
                    ref = out
                elif not np.array_equal(ref, out):
                    raise SystemExit(f"{kname} differs between backends on {label}")
                row[b] = _time(lambda: _run(g, kname), args.repeat)
            if "cython" in row:
                row["speedup"] = row["python"] / row["cython"] if row["cython"] else float("inf")
            rows.append(row)
    kernels.use_backend(backends[-1])
    print(f"{'graph':18} {'kernel':18} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for r in rows:
        print(f"{r['graph']:18} {r['kernel']:18} {r['python']:10.4f} {r.get('cython', float('nan')):10.4f} "
              f"{r.get('speedup', float('nan')):8.1f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
