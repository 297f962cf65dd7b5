"""Hot numeric kernels with a compiled core and a pure-Python fallback.

The compiled extension (``_native``, Cython) is preferred; when it is not
built, or when ``FAITHSUM_PURE_KERNELS=1`` is set, the pure-Python
implementation is used.  Both expose identical semantics; see
``benchmarks/bench_kernels.py`` for a speed comparison.
"""

from __future__ import annotations

import os
from typing import Sequence

import numpy as np

from . import _pure

if os.environ.get("FAITHSUM_PURE_KERNELS") == "1":
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]

        BACKEND = "native"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"


def _to_ids(a: Sequence, b: Sequence) -> tuple[list[int], list[int]]:
    ids: dict = {}
    out = []
    for seq in (a, b):
        row = []
        for item in seq:
            code = ids.setdefault(item, len(ids))
            row.append(code)
        out.append(row)
    return out[0], out[1]


def _as_int64(seq: Sequence[int]):
    if _impl is _pure:
        return list(seq)
    return np.asarray(seq, dtype=np.int64)


def lcs_length(a: Sequence, b: Sequence) -> int:
    """Longest-common-subsequence length over arbitrary hashable items."""
    ia, ib = _to_ids(a, b)
    return _impl.lcs_length(_as_int64(ia), _as_int64(ib))


def edit_distance(a: Sequence, b: Sequence) -> int:
    """Levenshtein distance over arbitrary hashable items (strings work)."""
    ia, ib = _to_ids(a, b)
    return _impl.edit_distance(_as_int64(ia), _as_int64(ib))


def power_iteration(
    weights: np.ndarray, damping: float, epsilon: float, max_iterations: int
) -> tuple[list[float], int]:
    """Damped power iteration; returns (scores, completed sweeps)."""
    w = np.ascontiguousarray(np.asarray(weights, dtype=np.float64))
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("weights must be a square matrix")
    if w.shape[0] == 0:
        return [], 0
    if _impl is _pure:
        return _pure.power_iteration(w.tolist(), damping, epsilon, max_iterations)
    scores, iters = _impl.power_iteration(w, damping, epsilon, max_iterations)
    return scores, iters
