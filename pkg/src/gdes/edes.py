"""The concrete two-round cipher over Z3 from the shipped preset.

Constants: 18-nit blocks, 20-nit keys, initial permutation P, expansion E,
key compressions CP1/CP2, and three 9x27 S-boxes (verbatim, including the
rows that violate the row-surjectivity design criterion).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .groups import cyclic
from .permnet import CipherSpec, WireMap, gdes_decrypt, gdes_encrypt
from .sbox import SBox, SBoxRoundSpec, _col_positions, _row_positions, sbox_lookup
from .words import (
    Word,
    concat,
    pack_indices,
    split_halves,
    word_add,
    word_to_indices,
    word_to_text,
)

Z3 = cyclic(3)

P_TABLE = (11, 12, 2, 13, 9, 1, 5, 8, 16, 17, 4, 18, 15, 7, 10, 3, 6, 14)
E_TABLE = (9, 1, 2, 3, 4, 5, 6, 3, 4, 5, 6, 7, 8, 9, 1)
CP1_TABLE = (16, 17, 12, 15, 20, 10, 11, 3, 7, 19, 13, 9, 8, 1, 18)
CP2_TABLE = (6, 7, 2, 20, 4, 3, 9, 8, 18, 10, 15, 14, 11, 12, 5)

SBOX_1 = (
    (24, 25, 6, 16, 3, 7, 1, 18, 26, 5, 10, 9, 19, 23, 13, 12, 15, 8, 20, 17, 2, 11, 0, 21, 14, 4, 22),
    (17, 18, 26, 9, 23, 0, 21, 11, 19, 25, 3, 2, 12, 16, 6, 5, 8, 1, 13, 10, 22, 4, 20, 14, 7, 24, 15),
    (16, 17, 25, 8, 22, 26, 20, 10, 18, 24, 2, 1, 11, 15, 5, 4, 7, 0, 12, 9, 21, 3, 19, 13, 6, 23, 14),
    (10, 11, 19, 2, 16, 20, 14, 4, 12, 18, 23, 22, 5, 9, 26, 25, 1, 21, 6, 3, 15, 24, 13, 7, 0, 17, 8),
    (21, 22, 3, 23, 0, 4, 25, 15, 23, 2, 7, 6, 16, 20, 10, 9, 12, 5, 17, 14, 26, 8, 24, 18, 11, 1, 19),
    (26, 0, 8, 18, 5, 9, 3, 20, 1, 7, 12, 11, 21, 25, 15, 14, 17, 10, 22, 19, 4, 13, 2, 23, 16, 6, 24),
    (3, 4, 12, 22, 9, 13, 7, 24, 5, 11, 16, 15, 25, 2, 19, 18, 21, 14, 26, 23, 8, 17, 6, 0, 20, 10, 1),
    (5, 6, 14, 24, 11, 15, 9, 26, 7, 13, 18, 17, 0, 4, 21, 20, 23, 16, 1, 25, 10, 19, 8, 2, 22, 12, 3),
    (11, 12, 20, 3, 17, 21, 15, 5, 13, 19, 24, 23, 6, 10, 0, 26, 2, 22, 7, 4, 16, 25, 14, 8, 1, 18, 9),
)

SBOX_2 = (
    (1, 2, 10, 20, 7, 11, 5, 22, 3, 9, 14, 13, 23, 0, 17, 16, 19, 12, 24, 21, 6, 15, 4, 25, 18, 8, 26),
    (25, 26, 7, 17, 22, 8, 2, 19, 0, 6, 11, 10, 20, 24, 14, 13, 16, 9, 21, 18, 3, 12, 1, 22, 15, 5, 23),
    (14, 15, 23, 6, 20, 24, 18, 8, 16, 22, 0, 26, 9, 13, 3, 2, 5, 25, 10, 7, 19, 1, 17, 11, 4, 21, 12),
    (9, 10, 18, 1, 15, 19, 13, 3, 11, 17, 22, 21, 4, 8, 25, 24, 0, 20, 5, 2, 14, 23, 12, 6, 26, 16, 7),
    (23, 24, 5, 15, 2, 6, 0, 17, 25, 4, 9, 8, 18, 22, 12, 11, 14, 7, 19, 16, 1, 10, 26, 20, 13, 3, 21),
    (2, 3, 11, 21, 8, 12, 6, 23, 4, 10, 15, 14, 24, 1, 18, 17, 20, 13, 25, 22, 7, 16, 5, 26, 19, 9, 0),
    (18, 19, 0, 10, 24, 1, 22, 12, 20, 26, 4, 3, 13, 17, 7, 6, 9, 2, 14, 11, 23, 5, 21, 15, 8, 25, 16),
    (15, 16, 24, 7, 21, 25, 19, 9, 17, 23, 1, 0, 10, 14, 4, 3, 6, 9, 13, 8, 20, 2, 18, 12, 5, 22, 13),
    (2, 23, 4, 14, 1, 5, 26, 16, 24, 3, 8, 7, 17, 21, 11, 10, 13, 16, 18, 15, 0, 9, 25, 19, 12, 2, 20),
)

SBOX_3 = (
    (4, 5, 13, 23, 10, 14, 8, 25, 6, 12, 17, 16, 26, 3, 20, 19, 22, 15, 0, 24, 9, 18, 7, 1, 21, 11, 2),
    (6, 7, 15, 25, 12, 16, 10, 0, 8, 14, 19, 18, 1, 5, 22, 21, 24, 17, 2, 26, 11, 20, 9, 3, 23, 13, 4),
    (7, 8, 16, 26, 13, 17, 11, 1, 9, 15, 20, 19, 2, 6, 23, 22, 25, 18, 3, 0, 12, 21, 10, 4, 24, 14, 5),
    (8, 9, 17, 0, 14, 18, 12, 2, 10, 16, 21, 20, 3, 7, 24, 23, 26, 19, 4, 1, 13, 22, 11, 5, 25, 15, 6),
    (13, 14, 22, 5, 19, 23, 17, 7, 15, 21, 26, 25, 8, 12, 2, 1, 4, 24, 9, 6, 18, 0, 16, 10, 3, 20, 11),
    (12, 13, 21, 4, 18, 22, 16, 6, 14, 20, 25, 24, 7, 11, 1, 0, 3, 23, 8, 5, 17, 26, 15, 9, 2, 19, 10),
    (19, 20, 1, 11, 25, 2, 23, 13, 21, 0, 5, 4, 14, 18, 10, 7, 10, 3, 15, 12, 24, 6, 22, 16, 9, 26, 17),
    (0, 1, 9, 19, 6, 10, 4, 21, 2, 8, 13, 12, 22, 26, 16, 15, 18, 11, 23, 20, 5, 14, 3, 24, 17, 7, 25),
    (20, 21, 2, 12, 26, 3, 24, 14, 22, 1, 6, 5, 15, 19, 9, 8, 11, 4, 16, 13, 25, 7, 23, 17, 10, 0, 18),
)


@lru_cache(maxsize=1)
def edes_spec() -> CipherSpec:
    """The built-in preset: Z3, t=9, 2 rounds, 20-nit key, final swap."""
    boxes = tuple(
        SBox(Z3, 2, 3, table) for table in (SBOX_1, SBOX_2, SBOX_3)
    )
    return CipherSpec(
        group=Z3,
        t=9,
        rounds=2,
        initial_perm=WireMap(18, P_TABLE),
        key_length=20,
        key_schedule=(WireMap(20, CP1_TABLE), WireMap(20, CP2_TABLE)),
        round_fn=SBoxRoundSpec(boxes, WireMap(9, E_TABLE)),
        final_swap=True,
    )


def edes_encrypt(key: Word, m: Word) -> Word:
    return gdes_encrypt(edes_spec(), key, m)


def edes_decrypt(key: Word, c: Word) -> Word:
    return gdes_decrypt(edes_spec(), key, c)


@dataclass(frozen=True)
class SBoxStep:
    """One S-box application inside a traced round."""

    box: int
    input: str
    row: int
    col: int
    entry: int
    output: str


@dataclass(frozen=True)
class EdesTrace:
    """Every intermediate value of one two-round encryption."""

    m: str
    k: str
    m1: str
    m2: str
    m3: str
    k1: str
    m4: str
    round1: tuple[SBoxStep, ...]
    m5: str
    m6: str
    m7: str
    e1: str
    e2: str
    e3: str
    k2: str
    e4: str
    round2: tuple[SBoxStep, ...]
    e5: str
    e6: str
    e7: str
    e8: str
    c: str

    def as_dict(self) -> dict:
        def steps(items):
            return [
                {
                    "box": s.box,
                    "input": s.input,
                    "row": s.row,
                    "col": s.col,
                    "entry": s.entry,
                    "output": s.output,
                }
                for s in items
            ]

        return {
            "m": self.m,
            "k": self.k,
            "m1": self.m1,
            "m2": self.m2,
            "m3": self.m3,
            "k1": self.k1,
            "m4": self.m4,
            "round1_sboxes": steps(self.round1),
            "m5": self.m5,
            "m6": self.m6,
            "m7": self.m7,
            "e1": self.e1,
            "e2": self.e2,
            "e3": self.e3,
            "k2": self.k2,
            "e4": self.e4,
            "round2_sboxes": steps(self.round2),
            "e5": self.e5,
            "e6": self.e6,
            "e7": self.e7,
            "e8": self.e8,
            "c": self.c,
        }


def _sbox_steps(spec, mixed: Word) -> tuple[tuple[SBoxStep, ...], Word]:
    """Apply each box to its block of `mixed`, recording every selection."""
    rf = spec.round_fn
    span = rf.i + rf.j
    q = rf.group.order
    row_pos = _row_positions(rf.i, rf.j)
    col_pos = _col_positions(rf.i, rf.j)
    steps = []
    out = None
    for s, box in enumerate(rf.boxes):
        block = Word(mixed.group, mixed.nits[s * span : (s + 1) * span])
        digits = word_to_indices(block)
        row = pack_indices([digits[p] for p in row_pos], q)
        col = pack_indices([digits[p] for p in col_pos], q)
        piece = sbox_lookup(box, block)
        steps.append(
            SBoxStep(
                box=s + 1,
                input=word_to_text(block),
                row=row,
                col=col,
                entry=box.table[row][col],
                output=word_to_text(piece),
            )
        )
        out = piece if out is None else concat(out, piece)
    return tuple(steps), out


def edes_trace(key: Word, m: Word) -> EdesTrace:
    """Replay one encryption through the permutation and S-box primitives,
    keeping every named intermediate value."""
    spec = edes_spec()
    spec.validate_key(key)
    k1, k2 = spec.subkeys(key)
    rf = spec.round_fn

    m1 = spec.initial_perm.apply(m)
    m6, m2 = split_halves(m1)
    m3 = rf.expansion.apply(m2)
    m4 = word_add(m3, k1)
    round1, m5 = _sbox_steps(spec, m4)
    m7 = word_add(m6, m5)
    e1 = concat(m2, m7)

    e6, e2 = split_halves(e1)
    e3 = rf.expansion.apply(e2)
    e4 = word_add(e3, k2)
    round2, e5 = _sbox_steps(spec, e4)
    e7 = word_add(e6, e5)
    e8 = concat(e7, e2)
    c = spec.final_perm.apply(e8)

    t = word_to_text
    return EdesTrace(
        m=t(m), k=t(key),
        m1=t(m1), m2=t(m2), m3=t(m3), k1=t(k1), m4=t(m4),
        round1=round1, m5=t(m5), m6=t(m6), m7=t(m7),
        e1=t(e1), e2=t(e2), e3=t(e3), k2=t(k2), e4=t(e4),
        round2=round2, e5=t(e5), e6=t(e6), e7=t(e7), e8=t(e8),
        c=t(c),
    )
