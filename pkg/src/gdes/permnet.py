"""Wire maps, Feistel rounds, and the generic group-DES pipeline.

A wire map uses gather semantics throughout: output position p carries the
input nit at ``table[p]`` (1-based).  A cipher is the composition
initial perm -> n Feistel rounds -> optional swap -> inverse initial perm.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, NotInvertibleError, SpecValidationError
from .groups import GroupSpec
from .words import (
    Word,
    concat,
    pack_indices,
    split_halves,
    unpack_indices,
    word_add,
    word_from_indices,
    word_sub,
    word_to_indices,
)

State = tuple[Word, Word]


@dataclass(frozen=True)
class WireMap:
    """A gather table: output nit p = input nit table[p] (1-based)."""

    in_length: int
    table: tuple[int, ...]

    def __post_init__(self):
        table = tuple(int(s) for s in self.table)
        if self.in_length < 1 or not table:
            raise ValueError("wire map needs positive widths")
        bad = [s for s in table if not (1 <= s <= self.in_length)]
        if bad:
            raise ValueError(f"source positions {bad} outside 1..{self.in_length}")
        object.__setattr__(self, "table", table)

    @property
    def out_length(self) -> int:
        return len(self.table)

    @classmethod
    def identity(cls, n: int) -> WireMap:
        return cls(n, tuple(range(1, n + 1)))

    def is_permutation(self) -> bool:
        return self.in_length == self.out_length and len(set(self.table)) == self.in_length

    def apply(self, w: Word) -> Word:
        if w.length != self.in_length:
            raise DimensionError(
                f"wire map expects {self.in_length} nits, got {w.length}"
            )
        return Word(w.group, tuple(w.nits[s - 1] for s in self.table))

    def inverted(self) -> WireMap:
        if not self.is_permutation():
            raise NotInvertibleError(
                f"{self.in_length}->{self.out_length} map is not a bijection"
            )
        inv = [0] * self.in_length
        for pos, src in enumerate(self.table, start=1):
            inv[src - 1] = pos
        return WireMap(self.in_length, tuple(inv))


def wiremap_apply(wmap: WireMap, w: Word) -> Word:
    return wmap.apply(w)


def wiremap_invert(wmap: WireMap) -> WireMap:
    return wmap.inverted()


@dataclass(frozen=True)
class ExplicitRoundFunction:
    """A round function given as a full lookup table over G^t.

    ``outputs[idx]`` is the packed (base |G|, big-endian over nit indices)
    image of the t-nit word with packed index ``idx``.  Used by the
    brute-force oracles; ignores the subkey argument.
    """

    group: GroupSpec
    t: int
    outputs: tuple[int, ...]

    def __post_init__(self):
        outputs = tuple(int(v) for v in self.outputs)
        size = self.group.order**self.t
        if len(outputs) != size:
            raise DimensionError(f"table has {len(outputs)} entries, expected {size}")
        if any(not (0 <= v < size) for v in outputs):
            raise ValueError("table entry out of range")
        object.__setattr__(self, "outputs", outputs)

    @property
    def subkey_length(self) -> int:
        return 0

    @classmethod
    def constant_zero(cls, group: GroupSpec, t: int) -> ExplicitRoundFunction:
        """The identity of the pointwise-sum group on round functions."""
        return cls(group, t, (0,) * group.order**t)

    @classmethod
    def from_mapping(cls, group: GroupSpec, t: int, fn: Callable[[Word], Word]) -> ExplicitRoundFunction:
        outs = []
        for idx in range(group.order**t):
            w = word_from_indices(group, unpack_indices(idx, group.order, t))
            outs.append(pack_indices(word_to_indices(fn(w)), group.order))
        return cls(group, t, tuple(outs))

    def is_injective(self) -> bool:
        return len(set(self.outputs)) == len(self.outputs)

    def evaluate(self, right: Word, subkey: Word | None = None) -> Word:
        if right.length != self.t or right.group != self.group:
            raise DimensionError(f"expected a {self.t}-nit word over {self.group}")
        out = self.outputs[pack_indices(word_to_indices(right), self.group.order)]
        return word_from_indices(self.group, unpack_indices(out, self.group.order, self.t))

    def packed_table(self, subkey: Word | None = None) -> np.ndarray:
        return np.array(self.outputs, dtype=np.int64)


def fn_odot(f: ExplicitRoundFunction, g: ExplicitRoundFunction) -> ExplicitRoundFunction:
    """Pointwise group sum of two explicit round functions."""
    if f.group != g.group or f.t != g.t:
        raise DimensionError("round functions must share group and width")
    q = f.group.order
    outs = []
    for a, b in zip(f.outputs, g.outputs):
        da = unpack_indices(a, q, f.t)
        db = unpack_indices(b, q, f.t)
        outs.append(pack_indices([f.group.index_add(x, y) for x, y in zip(da, db)], q))
    return ExplicitRoundFunction(f.group, f.t, tuple(outs))


def sigma(f, subkey: Word | None, state: State) -> State:
    """One Feistel round: (x, y) -> (y, x + f(y))."""
    x, y = state
    if x.length != y.length or x.group != y.group:
        raise DimensionError("state halves must share group and length")
    return y, word_add(x, f.evaluate(y, subkey))


def sigma_inv(f, subkey: Word | None, state: State) -> State:
    """Inverse Feistel round: (u, v) -> (v - f(u), u)."""
    u, v = state
    if u.length != v.length or u.group != v.group:
        raise DimensionError("state halves must share group and length")
    return word_sub(v, f.evaluate(u, subkey)), u


def psi(rounds: Sequence[tuple], state: State) -> State:
    """Apply Feistel rounds in list order: rounds[0] first.

    Each item is a (round function, subkey-or-None) pair.
    """
    for f, subkey in rounds:
        state = sigma(f, subkey, state)
    return state


@dataclass(frozen=True)
class CipherSpec:
    """A full n-round DES-like cipher instance over a finite abelian group.

    ``round_fn`` is either a keyed round-function spec (one object shared by
    all rounds, fed per-round subkeys selected by ``key_schedule``) or a
    tuple of per-round explicit tables (keyless; ``key_length`` must be 0).
    """

    group: GroupSpec
    t: int
    rounds: int
    initial_perm: WireMap
    key_length: int
    key_schedule: tuple[WireMap, ...]
    round_fn: object
    final_swap: bool = True

    def __post_init__(self):
        object.__setattr__(self, "key_schedule", tuple(self.key_schedule))
        if self.t < 1:
            raise SpecValidationError("half-width t must be >= 1")
        if self.rounds < 0:
            raise SpecValidationError("round count must be >= 0")
        p = self.initial_perm
        if p.in_length != 2 * self.t or not p.is_permutation():
            raise SpecValidationError(
                f"initial permutation must be a bijection of {2 * self.t} positions"
            )
        if isinstance(self.round_fn, tuple):
            if len(self.round_fn) != self.rounds:
                raise SpecValidationError(
                    f"{len(self.round_fn)} round tables for {self.rounds} rounds"
                )
            for erf in self.round_fn:
                if erf.group != self.group or erf.t != self.t:
                    raise SpecValidationError("round table has wrong group or width")
            if self.key_schedule or self.key_length != 0:
                raise SpecValidationError("table-driven ciphers are keyless")
        else:
            rf = self.round_fn
            if getattr(rf, "group", None) != self.group or rf.t != self.t:
                raise SpecValidationError("round function has wrong group or width")
            if self.key_length < 1:
                raise SpecValidationError("keyed cipher needs key_length >= 1")
            if len(self.key_schedule) != self.rounds:
                raise SpecValidationError(
                    f"{len(self.key_schedule)} schedule maps for {self.rounds} rounds"
                )
            for cp in self.key_schedule:
                if cp.in_length != self.key_length or cp.out_length != rf.subkey_length:
                    raise SpecValidationError(
                        f"schedule map must be {self.key_length}->{rf.subkey_length}"
                    )

    @property
    def block_length(self) -> int:
        return 2 * self.t

    @property
    def domain_size(self) -> int:
        return self.group.order ** (2 * self.t)

    @property
    def key_space_size(self) -> int:
        return self.group.order**self.key_length

    @property
    def final_perm(self) -> WireMap:
        return self.initial_perm.inverted()

    @property
    def is_keyed(self) -> bool:
        return not isinstance(self.round_fn, tuple)

    def validate_key(self, key: Word | None) -> Word:
        if not self.is_keyed:
            if key is not None and key.length != 0:
                raise DimensionError("cipher is keyless; pass no key")
            return Word(self.group, ())
        if key is None or key.length != self.key_length or key.group != self.group:
            raise DimensionError(
                f"key must be {self.key_length} nits over {self.group}"
            )
        return key

    def subkeys(self, key: Word | None) -> tuple[Word | None, ...]:
        key = self.validate_key(key)
        if not self.is_keyed:
            return (None,) * self.rounds
        return tuple(cp.apply(key) for cp in self.key_schedule)

    def bound_rounds(self, key: Word | None) -> list[tuple[object, Word | None]]:
        """(round function, subkey) per round, in application order."""
        sks = self.subkeys(key)
        if self.is_keyed:
            return [(self.round_fn, sk) for sk in sks]
        return list(zip(self.round_fn, sks))


def gdes_encrypt(spec: CipherSpec, key: Word | None, m: Word) -> Word:
    if m.length != spec.block_length or m.group != spec.group:
        raise DimensionError(
            f"message must be {spec.block_length} nits over {spec.group}"
        )
    state = split_halves(spec.initial_perm.apply(m))
    state = psi(spec.bound_rounds(key), state)
    if spec.final_swap:
        state = (state[1], state[0])
    return spec.final_perm.apply(concat(*state))


def gdes_decrypt(spec: CipherSpec, key: Word | None, c: Word) -> Word:
    if c.length != spec.block_length or c.group != spec.group:
        raise DimensionError(
            f"ciphertext must be {spec.block_length} nits over {spec.group}"
        )
    state = split_halves(spec.initial_perm.apply(c))
    if spec.final_swap:
        state = (state[1], state[0])
    for f, sk in reversed(spec.bound_rounds(key)):
        state = sigma_inv(f, sk, state)
    return spec.final_perm.apply(concat(*state))


def round_tables(spec: CipherSpec, key: Word | None = None) -> np.ndarray:
    """Per-round packed tables over G^t for a fixed key; shape (rounds, |G|^t).

    Row r maps the packed index of the right half to the packed index of
    f_r(right half) with that round's subkey mixed in.  This is the bridge
    between cipher specs and the iteration kernels.
    """
    rows = [rf.packed_table(sk) for rf, sk in spec.bound_rounds(key)]
    m = spec.group.order**spec.t
    if not rows:
        return np.zeros((0, m), dtype=np.int64)
    return np.stack(rows).astype(np.int64)


def identity_cipher(group: GroupSpec, t: int) -> CipherSpec:
    """Zero rounds, no swap: encryption is the identity map."""
    return CipherSpec(
        group=group,
        t=t,
        rounds=0,
        initial_perm=WireMap.identity(2 * t),
        key_length=0,
        key_schedule=(),
        round_fn=(),
        final_swap=False,
    )


def swap_cipher(group: GroupSpec, t: int) -> CipherSpec:
    """Zero rounds with the final swap: encryption is theta(x,y) = (y,x)."""
    return CipherSpec(
        group=group,
        t=t,
        rounds=0,
        initial_perm=WireMap.identity(2 * t),
        key_length=0,
        key_schedule=(),
        round_fn=(),
        final_swap=True,
    )
