"""Brute-force oracles on tiny domains: explicit permutations, closure,
purity, identity, generated order, and permutation parity.

States are packed big-endian over nit indices, matching the words codec,
so explicit permutations line up index-for-index with the cycling engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations as iter_permutations

import numpy as np

from . import _kernels
from ._tables import index_add_matrix
from .errors import CapacityError, DimensionError
from .groups import GroupSpec
from .permnet import CipherSpec, ExplicitRoundFunction, gdes_encrypt
from .words import Word, int_to_word, word_to_int

MATERIALIZE_LIMIT = 2**24
STREAMING_LIMIT = 2**32
ENUMERATION_BUILD_LIMIT = 10**7
PURITY_SET_LIMIT = 300
GENERATED_ORDER_CAP = 10**6


@dataclass(frozen=True, eq=False)
class ExplicitPerm:
    """A permutation of {0..N-1} as its image array."""

    image: np.ndarray

    def __post_init__(self):
        image = np.asarray(self.image, dtype=np.int64)
        n = image.shape[0]
        if image.ndim != 1 or not np.array_equal(np.sort(image), np.arange(n)):
            raise ValueError("image array is not a bijection of 0..N-1")
        image.setflags(write=False)
        object.__setattr__(self, "image", image)
        object.__setattr__(self, "_key", image.tobytes())

    @property
    def n(self) -> int:
        return self.image.shape[0]

    def key(self) -> bytes:
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, ExplicitPerm) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)


def identity_perm(n: int) -> ExplicitPerm:
    return ExplicitPerm(np.arange(n, dtype=np.int64))


def materialize(spec: CipherSpec, key: Word | None = None) -> ExplicitPerm:
    """Tabulate the encryption permutation state by state."""
    n = spec.domain_size
    if n > MATERIALIZE_LIMIT:
        raise CapacityError(f"domain of {n} states exceeds the materialize limit")
    image = np.empty(n, dtype=np.int64)
    for s in range(n):
        m = int_to_word(s, spec.group, spec.block_length)
        image[s] = word_to_int(gdes_encrypt(spec, key, m))
    return ExplicitPerm(image)


def perm_compose(p: ExplicitPerm, q: ExplicitPerm) -> ExplicitPerm:
    """(p o q)[s] = p[q[s]] (q applied first)."""
    if p.n != q.n:
        raise DimensionError(f"size mismatch: {p.n} vs {q.n}")
    return ExplicitPerm(p.image[q.image])


def perm_inverse(p: ExplicitPerm) -> ExplicitPerm:
    inv = np.empty(p.n, dtype=np.int64)
    inv[p.image] = np.arange(p.n, dtype=np.int64)
    return ExplicitPerm(inv)


def perm_cycle_lengths(p: ExplicitPerm) -> list[int]:
    """All cycle lengths, one per cycle, in discovery order."""
    seen = np.zeros(p.n, dtype=bool)
    out = []
    img = p.image
    for s in range(p.n):
        if seen[s]:
            continue
        length = 0
        c = s
        while not seen[c]:
            seen[c] = True
            c = img[c]
            length += 1
        out.append(length)
    return out


def cycle_length_through(p: ExplicitPerm, start: int) -> int:
    img = p.image
    c = int(img[start])
    length = 1
    while c != start:
        c = int(img[c])
        length += 1
    return length


def perm_sign(p: ExplicitPerm) -> int:
    """+1 for even permutations, -1 for odd (via cycle decomposition)."""
    cycles = len(perm_cycle_lengths(p))
    return 1 if (p.n - cycles) % 2 == 0 else -1


def streaming_sign(spec: CipherSpec, key: Word | None = None) -> int:
    """Parity of the encryption permutation via a visited bitmap.

    Walks every cycle of the swap-and-rounds core, which is conjugate to
    the full cipher by the initial permutation and so has the same cycle
    type.  Memory: N/8 bytes of bitmap plus the round tables.
    """
    n = spec.domain_size
    if n > STREAMING_LIMIT:
        raise CapacityError(f"domain of {n} states exceeds the streaming limit")
    program = _kernels.compile_program(spec, [(key, False)])
    bitmap = np.zeros((n + 7) // 8, dtype=np.uint8)
    cycles = _kernels.count_cycles(
        program.ops,
        program.tbl,
        program.f,
        program.addh,
        program.addl,
        program.subh,
        program.subl,
        np.int64(program.split),
        np.int64(program.high),
        np.int64(program.m),
        bitmap,
        _kernels.BIT_MASKS,
    )
    return 1 if (n - int(cycles)) % 2 == 0 else -1


def feistel_perm(group: GroupSpec, t: int, f: ExplicitRoundFunction) -> ExplicitPerm:
    """sigma_f as an explicit permutation of packed (x, y) states."""
    if f.group != group or f.t != t:
        raise DimensionError("round function has wrong group or width")
    m = group.order**t
    padd = _packed_add(group, t)
    fout = np.array(f.outputs, dtype=np.int64)
    added = padd[np.arange(m)[:, None], fout[None, :]]  # added[x, y] = x + f(y)
    image = (np.arange(m, dtype=np.int64)[None, :] * m + added).reshape(-1)
    return ExplicitPerm(image)


def swap_perm(group: GroupSpec, t: int) -> ExplicitPerm:
    m = group.order**t
    x = np.arange(m, dtype=np.int64)
    return ExplicitPerm((x[None, :] * m + x[:, None]).reshape(-1))


def _packed_add(group: GroupSpec, t: int) -> np.ndarray:
    """Full packed-addition table over G^t; tiny domains only."""
    m = group.order**t
    if m > 4096:
        raise CapacityError("packed-add table too large; use the kernels instead")
    from ._tables import digit_matrix

    dm = digit_matrix(group.order, t)
    add = index_add_matrix(group)
    out = np.zeros((m, m), dtype=np.int64)
    for p in range(t):
        out = out * group.order + add[dm[:, p][:, None], dm[:, p][None, :]]
    return out


def all_bijective_round_functions(group: GroupSpec, t: int) -> list[ExplicitRoundFunction]:
    """Every one-to-one f: G^t -> G^t; only feasible for tiny G^t."""
    m = group.order**t
    if math.factorial(m) > 10**6:
        raise CapacityError(f"{m}! bijections is too many to enumerate")
    return [
        ExplicitRoundFunction(group, t, perm) for perm in iter_permutations(range(m))
    ]


def enumerate_feistel_set(
    group: GroupSpec,
    t: int,
    round_functions: list[ExplicitRoundFunction],
    n: int,
    include_swap: bool = False,
) -> list[ExplicitPerm]:
    """All n-round Feistel permutations with rounds drawn from the given set,
    deduplicated; with include_swap, the final swap is composed on (the
    GDES form, initial/final permutation omitted)."""
    m = group.order**t
    if len(round_functions) ** n * m * m > ENUMERATION_BUILD_LIMIT:
        raise CapacityError("enumeration exceeds the build guard")
    gens = [feistel_perm(group, t, f) for f in round_functions]
    level = {identity_perm(m * m)}
    for _ in range(n):
        level = {perm_compose(g, p) for g in gens for p in level}
    if include_swap:
        sw = swap_perm(group, t)
        level = {perm_compose(sw, p) for p in level}
    return sorted(level, key=lambda p: p.key())


def contains_identity(perms) -> bool:
    seq = list(perms)
    if not seq:
        return False
    return identity_perm(seq[0].n) in set(seq)


def closure_check(perms) -> tuple[bool, tuple[int, int] | None]:
    """Is the set closed under composition?  Witness = first (i, j) with
    perms[i] o perms[j] outside the set."""
    seq = list(perms)
    members = {p.key() for p in seq}
    for i, p in enumerate(seq):
        for j, q in enumerate(seq):
            if p.image[q.image].tobytes() not in members:
                return False, (i, j)
    return True, None


def purity_check(perms) -> tuple[bool, tuple[int, int, int] | None]:
    """Triple-product purity test with a cross-check via the closure of
    T0^-1 * S (the two characterizations must agree)."""
    seq = list(perms)
    if len(seq) > PURITY_SET_LIMIT:
        raise CapacityError(f"purity check limited to {PURITY_SET_LIMIT} permutations")
    members = {p.key() for p in seq}
    inverses = [perm_inverse(p) for p in seq]
    verdict = True
    witness = None
    for i, p in enumerate(seq):
        if not verdict:
            break
        for j, qinv in enumerate(inverses):
            pq = p.image[qinv.image]
            for k, r in enumerate(seq):
                if pq[r.image].tobytes() not in members:
                    verdict, witness = False, (i, j, k)
                    break
            if not verdict:
                break
    shifted = [perm_compose(inverses[0], p) for p in seq]
    lemma_verdict, _ = closure_check(shifted)
    if lemma_verdict != verdict:
        raise AssertionError(
            "purity characterizations disagree; internal invariant broken"
        )
    return verdict, witness


def generated_order(perms, cap: int = GENERATED_ORDER_CAP) -> int | None:
    """Order of the generated group via closure BFS; None when it passes cap.

    A finite set of permutations closed under composition is a group, so
    the semigroup closure equals the generated subgroup.
    """
    gens = list(perms)
    if not gens:
        raise ValueError("need at least one generator")
    seen = {p.key(): p for p in gens}
    frontier = list(gens)
    while frontier:
        if len(seen) > cap:
            return None
        nxt = []
        for p in frontier:
            for g in gens:
                q = ExplicitPerm(p.image[g.image])
                if q.key() not in seen:
                    seen[q.key()] = q
                    nxt.append(q)
        frontier = nxt
    return len(seen)
