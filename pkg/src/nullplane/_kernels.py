"""Hot loops for polynomial matrices.

A polynomial matrix is an integer array of shape ``(degree + 1, rows, cols)``.
The numba kernel is used unless ``NULLPLANE_NO_NUMBA=1`` is set or numba
cannot be imported; the numpy kernel computes the same thing.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def polymatmul_numpy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    da, n, k = a.shape
    db, _, m = b.shape
    out = np.zeros((da + db - 1, n, m), dtype=a.dtype)
    for i in range(da):
        if not a[i].any():
            continue
        for j in range(db):
            out[i + j] += a[i] @ b[j]
    return out


if numba is not None:

    @numba.njit(cache=True)
    def _polymatmul_nb(a, b):
        da, n, k = a.shape
        db, _, m = b.shape
        out = np.zeros((da + db - 1, n, m), dtype=np.int64)
        for i in range(da):
            for r in range(n):
                for t in range(k):
                    x = a[i, r, t]
                    if x == 0:
                        continue
                    for j in range(db):
                        for c in range(m):
                            y = b[j, t, c]
                            if y != 0:
                                out[i + j, r, c] += x * y
        return out

    def polymatmul_numba(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return _polymatmul_nb(np.ascontiguousarray(a), np.ascontiguousarray(b))

else:  # pragma: no cover
    polymatmul_numba = None


def use_numba() -> bool:
    return polymatmul_numba is not None and os.environ.get("NULLPLANE_NO_NUMBA", "") not in ("1", "true", "yes")


def backend() -> str:
    return "numba" if use_numba() else "numpy"


def polymatmul_int64(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two int64 polynomial matrices; the caller rules out overflow."""
    if use_numba():
        return polymatmul_numba(a, b)
    return polymatmul_numpy(a, b)
