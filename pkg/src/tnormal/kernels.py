"""Kernel selection: the compiled extension when available, else pure Python.

Set TNORMAL_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

_compiled = None
if not os.environ.get("TNORMAL_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"
_INT64_SAFE = 2 ** 62


def backends() -> dict:
    """Available kernel modules by name."""
    out = {"python": _pykernels}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out


def atom_numerators(b: int, n: int, d: int, m: int) -> list[int]:
    if _compiled is not None and n <= 63:
        return _compiled.atom_numerators(b, n, d, m)
    return _pykernels.atom_numerators(b, n, d, m)


def orbit_numerators(p: int, q: int, b: int, count: int) -> np.ndarray:
    if _compiled is not None and 0 < q <= _INT64_SAFE // b:
        return _compiled.orbit_numerators(p, q, b, count)
    if q * b > _INT64_SAFE:
        # numerators may not fit in int64; keep Python ints
        out, u = [], p % q
        for _ in range(count):
            out.append(u)
            u = (u * b) % q
        return np.array(out, dtype=object)
    return _pykernels.orbit_numerators(p, q, b, count)


def discrepancy_scan(sorted_u, q: int, count: int) -> int:
    if (_compiled is not None and isinstance(sorted_u, np.ndarray)
            and sorted_u.dtype == np.int64 and count * q <= _INT64_SAFE):
        return int(_compiled.discrepancy_scan(np.ascontiguousarray(sorted_u), q, count))
    return _pykernels.discrepancy_scan(sorted_u, q, count)
