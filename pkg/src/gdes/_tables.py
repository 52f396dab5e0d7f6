"""Cached index tables shared by the vectorized paths and the kernels."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import CapacityError
from .groups import GroupSpec

# Largest packed half-width the split-add tables will materialize; the
# table for one half is (order**ceil(t/2))**2 entries.
HALF_TABLE_LIMIT = 4096


@lru_cache(maxsize=None)
def digit_matrix(base: int, length: int) -> np.ndarray:
    """All base-`base` digit strings of `length`, one row per packed value."""
    n = base**length
    values = np.arange(n, dtype=np.int64)
    cols = [(values // base ** (length - 1 - p)) % base for p in range(length)]
    return np.stack(cols, axis=1) if cols else np.zeros((n, 0), dtype=np.int64)


@lru_cache(maxsize=None)
def index_add_matrix(group: GroupSpec) -> np.ndarray:
    q = group.order
    tab = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        for b in range(q):
            tab[a, b] = group.index_add(a, b)
    return tab


@lru_cache(maxsize=None)
def index_sub_matrix(group: GroupSpec) -> np.ndarray:
    q = group.order
    tab = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        for b in range(q):
            neg_b = group.elem_index(group.neg(group.elem_at(b)))
            tab[a, b] = group.index_add(a, neg_b)
    return tab


def _packed_op_table(group: GroupSpec, width: int, op: np.ndarray) -> np.ndarray:
    """Digit-wise `op` on packed width-digit values, as a flat n*n table."""
    q = group.order
    n = q**width
    dm = digit_matrix(q, width)
    out = np.zeros((n, n), dtype=np.int64)
    for p in range(width):
        out = out * q + op[dm[:, p][:, None], dm[:, p][None, :]]
    return out.reshape(-1)


@lru_cache(maxsize=None)
def half_tables(group: GroupSpec, t: int) -> tuple:
    """Split-add/sub tables for packed t-digit halves.

    Returns (addh, addl, subh, subl, split, high) where a half value v
    splits as (v // split, v % split) and packed ops are
    table_h[(ah * high) + bh] + table_l[(al * split) + bl].
    """
    q = group.order
    wl = t // 2
    wh = t - wl
    if q**wh > HALF_TABLE_LIMIT:
        raise CapacityError(
            f"half-width {wh} over {group} exceeds the packed-table guard"
        )
    split = q**wl
    high = q**wh
    add = index_add_matrix(group)
    sub = index_sub_matrix(group)
    addh = _packed_op_table(group, wh, add) * split
    addl = _packed_op_table(group, wl, add)
    subh = _packed_op_table(group, wh, sub) * split
    subl = _packed_op_table(group, wl, sub)
    return addh, addl, subh, subl, split, high
