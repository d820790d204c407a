"""Hot graph kernels.

The compiled extension is used when it imports; setting ``GEODEX_PURE=1``
(or calling :func:`use_backend`) selects the numpy/scipy fallback.  Both
backends expose the same functions and return identical arrays.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on the build
    _ckernels = None

NAMES = (
    "bfs_distances",
    "path_count_census",
    "ci_bi_extremes",
    "extend_geodesics",
    "extend_arcs",
    "orbit_labels",
)

_active: ModuleType = _pykernels


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _ckernels is not None else [])


def use_backend(name: str) -> None:
    global _active
    if name == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built")
        _active = _ckernels
    elif name == "python":
        _active = _pykernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    globals().update({k: getattr(_active, k) for k in NAMES})


def backend() -> str:
    return "cython" if _active is _ckernels and _ckernels is not None else "python"


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("GEODEX_THREADS", "1")))
    except ValueError:
        return 1


use_backend("python" if os.environ.get("GEODEX_PURE") == "1" or _ckernels is None else "cython")
