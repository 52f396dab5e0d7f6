"""Numba hot loops and the compiled-program representation they run.

A "program" is one application of a (possibly composed) encryption
permutation, expressed on packed half-block states: a sequence of opcodes
over per-round lookup tables.  All kernels release the GIL so independent
probes can run on threads.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from numba import njit

from ._tables import half_tables
from .errors import CapacityError
from .permnet import CipherSpec, round_tables
from .words import Word, pack_indices, word_from_indices, word_to_indices

OP_FWD = 0
OP_INV = 1
OP_SWAP = 2

BIT_MASKS = np.array([1 << b for b in range(8)], dtype=np.uint8)

# Packed full states and key spaces must stay below 2**63.
STATE_LIMIT = 2**62


@dataclass
class Program:
    """One application of a composed permutation on packed (L, R) halves."""

    spec: CipherSpec
    ops: np.ndarray  # int8 opcodes
    tbl: np.ndarray  # int32 row of F per op (-1 for swaps)
    f: np.ndarray  # (n_tables, M) int64 round tables
    addh: np.ndarray
    addl: np.ndarray
    subh: np.ndarray
    subl: np.ndarray
    split: int
    high: int
    m: int  # |G|^t

    def digest(self) -> str:
        h = hashlib.sha1()
        h.update(self.ops.tobytes())
        h.update(self.tbl.tobytes())
        h.update(self.f.tobytes())
        h.update(str(self.m).encode())
        return h.hexdigest()


def compile_program(
    spec: CipherSpec, parts: list[tuple[Word | None, bool]]
) -> Program:
    """Build the program for parts applied left to right.

    Each part is (key, inverse): one full cipher application, inverted if
    requested.  All parts share the spec, so the initial permutation is
    conjugated away; callers must enter/leave packed state via
    ``state_from_word`` / ``word_from_state``.
    """
    m = spec.group.order**spec.t
    if m * m > STATE_LIMIT:
        raise CapacityError(f"state space {m * m} exceeds the engine limit")
    addh, addl, subh, subl, split, high = half_tables(spec.group, spec.t)
    blocks: list[np.ndarray] = []
    ops: list[int] = []
    tbl: list[int] = []
    offset = 0
    for key, inverse in parts:
        tables = round_tables(spec, key)
        blocks.append(tables)
        n = tables.shape[0]
        if not inverse:
            for r in range(n):
                ops.append(OP_FWD)
                tbl.append(offset + r)
            if spec.final_swap:
                ops.append(OP_SWAP)
                tbl.append(-1)
        else:
            if spec.final_swap:
                ops.append(OP_SWAP)
                tbl.append(-1)
            for r in range(n - 1, -1, -1):
                ops.append(OP_INV)
                tbl.append(offset + r)
        offset += n
    f = np.vstack(blocks) if blocks else np.zeros((0, m), dtype=np.int64)
    return Program(
        spec=spec,
        ops=np.array(ops, dtype=np.int8),
        tbl=np.array(tbl, dtype=np.int32),
        f=f.astype(np.int64),
        addh=addh,
        addl=addl,
        subh=subh,
        subl=subl,
        split=split,
        high=high,
        m=m,
    )


def state_from_word(spec: CipherSpec, msg: Word) -> tuple[int, int]:
    """Packed (L, R) of the initial-permuted message."""
    digits = word_to_indices(spec.initial_perm.apply(msg))
    q = spec.group.order
    return (
        pack_indices(digits[: spec.t], q),
        pack_indices(digits[spec.t :], q),
    )


def word_from_state(spec: CipherSpec, left: int, right: int) -> Word:
    """Invert ``state_from_word``: back through the final permutation."""
    from .words import unpack_indices

    q = spec.group.order
    digits = unpack_indices(left, q, spec.t) + unpack_indices(right, q, spec.t)
    return spec.final_perm.apply(word_from_indices(spec.group, digits))


@njit(inline="always")
def _apply_program(L, R, ops, tbl, f, addh, addl, subh, subl, split, high):
    for p in range(ops.shape[0]):
        op = ops[p]
        if op == 0:
            fr = f[tbl[p], R]
            s = (
                addh[(L // split) * high + (fr // split)]
                + addl[(L % split) * split + (fr % split)]
            )
            L = R
            R = s
        elif op == 1:
            fl = f[tbl[p], L]
            s = (
                subh[(R // split) * high + (fl // split)]
                + subl[(R % split) * split + (fl % split)]
            )
            R = L
            L = s
        else:
            tmp = L
            L = R
            R = tmp
    return L, R


@njit(nogil=True, cache=True)
def orbit_chunk(L, R, L0, R0, ops, tbl, f, addh, addl, subh, subl, split, high, chunk):
    """Advance until the state returns to (L0, R0) or `chunk` steps elapse.

    Returns (hit, steps, L, R) with steps counted within this chunk.
    """
    steps = np.int64(0)
    while steps < chunk:
        L, R = _apply_program(L, R, ops, tbl, f, addh, addl, subh, subl, split, high)
        steps += 1
        if L == L0 and R == R0:
            return True, steps, L, R
    return False, steps, L, R


@njit(nogil=True, cache=True)
def count_cycles(ops, tbl, f, addh, addl, subh, subl, split, high, m, bitmap, masks):
    """Number of cycles of the program permutation over all m*m states."""
    cycles = np.int64(0)
    n = m * m
    for s in range(n):
        if bitmap[s >> 3] & masks[s & 7]:
            continue
        cycles += 1
        L = s // m
        R = s % m
        while True:
            idx = L * m + R
            bitmap[idx >> 3] |= masks[idx & 7]
            L, R = _apply_program(
                L, R, ops, tbl, f, addh, addl, subh, subl, split, high
            )
            if L * m + R == s:
                break
    return cycles


@njit(inline="always")
def _mix64(v):
    z = (v + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def mix64(value: int) -> int:
    """Python twin of the kernel mixing function (splitmix64 finalizer)."""
    mask = (1 << 64) - 1
    z = (value + 0x9E3779B97F4A7C15) & mask
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    return z ^ (z >> 31)


@njit(inline="always")
def _keyed_step(
    x,
    seed,
    q,
    t,
    key_length,
    key_space,
    final_swap,
    p0,
    pinv0,
    cp,
    exp0,
    row_pos,
    col_pos,
    boxes,
    n_cols,
    j_width,
    idx_add,
    d_in,
    d_perm,
    kd,
    mix,
    lbuf,
    rbuf,
    nbuf,
):
    """One pseudorandom-walk step: encrypt x under the key mixed from x."""
    t2 = 2 * t
    span = row_pos.shape[0] + col_pos.shape[0]
    n_boxes = boxes.shape[0]
    rounds = cp.shape[0]
    # key choice from the previous ciphertext
    kk = np.int64(_mix64(np.uint64(x) + seed) % np.uint64(key_space))
    for p in range(key_length - 1, -1, -1):
        kd[p] = kk % q
        kk //= q
    # unpack state and apply the initial permutation
    v = x
    for p in range(t2 - 1, -1, -1):
        d_in[p] = v % q
        v //= q
    for p in range(t2):
        d_perm[p] = d_in[p0[p]]
    for p in range(t):
        lbuf[p] = d_perm[p]
        rbuf[p] = d_perm[t + p]
    for r in range(rounds):
        for s in range(exp0.shape[0]):
            mix[s] = idx_add[kd[cp[r, s]], rbuf[exp0[s]]]
        for b in range(n_boxes):
            base = b * span
            row = np.int64(0)
            for p in range(row_pos.shape[0]):
                row = row * q + mix[base + row_pos[p]]
            col = np.int64(0)
            for p in range(col_pos.shape[0]):
                col = col * q + mix[base + col_pos[p]]
            ent = boxes[b, row * n_cols + col]
            for p in range(j_width - 1, -1, -1):
                nbuf[b * j_width + p] = ent % q
                ent //= q
        for p in range(t):
            nbuf[p] = idx_add[lbuf[p], nbuf[p]]
        tmp = lbuf
        lbuf = rbuf
        rbuf = nbuf
        nbuf = tmp
    if final_swap:
        tmp = lbuf
        lbuf = rbuf
        rbuf = tmp
    for p in range(t):
        d_in[p] = lbuf[p]
        d_in[t + p] = rbuf[p]
    out = np.int64(0)
    for p in range(t2):
        out = out * q + d_in[pinv0[p]]
    return out


@njit(nogil=True, cache=True)
def brent_walk(
    x0,
    seed,
    max_steps,
    q,
    t,
    key_length,
    key_space,
    final_swap,
    p0,
    pinv0,
    cp,
    exp0,
    row_pos,
    col_pos,
    boxes,
    n_cols,
    j_width,
    idx_add,
):
    """Brent cycle detection on the keyed walk; returns (found, mu, lam, steps)."""
    t2 = 2 * t
    sk_len = exp0.shape[0]
    d_in = np.zeros(t2, dtype=np.int64)
    d_perm = np.zeros(t2, dtype=np.int64)
    kd = np.zeros(key_length, dtype=np.int64)
    mix = np.zeros(sk_len, dtype=np.int64)
    lbuf = np.zeros(t, dtype=np.int64)
    rbuf = np.zeros(t, dtype=np.int64)
    nbuf = np.zeros(t, dtype=np.int64)

    power = np.int64(1)
    lam = np.int64(1)
    tortoise = x0
    hare = _keyed_step(
        x0, seed, q, t, key_length, key_space, final_swap, p0, pinv0, cp, exp0,
        row_pos, col_pos, boxes, n_cols, j_width, idx_add,
        d_in, d_perm, kd, mix, lbuf, rbuf, nbuf,
    )
    steps = np.int64(1)
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = _keyed_step(
            hare, seed, q, t, key_length, key_space, final_swap, p0, pinv0, cp,
            exp0, row_pos, col_pos, boxes, n_cols, j_width, idx_add,
            d_in, d_perm, kd, mix, lbuf, rbuf, nbuf,
        )
        lam += 1
        steps += 1
        if steps >= max_steps:
            return False, np.int64(-1), np.int64(-1), steps
    tortoise = x0
    hare = x0
    for _ in range(lam):
        hare = _keyed_step(
            hare, seed, q, t, key_length, key_space, final_swap, p0, pinv0, cp,
            exp0, row_pos, col_pos, boxes, n_cols, j_width, idx_add,
            d_in, d_perm, kd, mix, lbuf, rbuf, nbuf,
        )
        steps += 1
    mu = np.int64(0)
    while tortoise != hare:
        tortoise = _keyed_step(
            tortoise, seed, q, t, key_length, key_space, final_swap, p0, pinv0,
            cp, exp0, row_pos, col_pos, boxes, n_cols, j_width, idx_add,
            d_in, d_perm, kd, mix, lbuf, rbuf, nbuf,
        )
        hare = _keyed_step(
            hare, seed, q, t, key_length, key_space, final_swap, p0, pinv0, cp,
            exp0, row_pos, col_pos, boxes, n_cols, j_width, idx_add,
            d_in, d_perm, kd, mix, lbuf, rbuf, nbuf,
        )
        mu += 1
        steps += 2
    return True, mu, lam, steps
