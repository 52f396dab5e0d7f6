"""Fixed-length nit strings and their codecs.

A word is a sequence of group elements ("nits").  The leftmost nit is
position 1 and is most significant in the integer codec.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, RangeError, WordParseError
from .groups import GroupElem, GroupSpec


@dataclass(frozen=True)
class Word:
    group: GroupSpec
    nits: tuple[GroupElem, ...]

    def __post_init__(self):
        nits = tuple(tuple(int(r) for r in nit) for nit in self.nits)
        for nit in nits:
            self.group.validate(nit)
        object.__setattr__(self, "nits", nits)

    @property
    def length(self) -> int:
        return len(self.nits)

    def __len__(self) -> int:
        return len(self.nits)

    def __str__(self) -> str:
        return word_to_text(self)


def _require_compatible(a: Word, b: Word) -> None:
    if a.group != b.group:
        raise DimensionError(f"group mismatch: {a.group} vs {b.group}")
    if a.length != b.length:
        raise DimensionError(f"length mismatch: {a.length} vs {b.length}")


def word_add(a: Word, b: Word) -> Word:
    _require_compatible(a, b)
    g = a.group
    return Word(g, tuple(g.add(x, y) for x, y in zip(a.nits, b.nits)))


def word_sub(a: Word, b: Word) -> Word:
    _require_compatible(a, b)
    g = a.group
    return Word(g, tuple(g.sub(x, y) for x, y in zip(a.nits, b.nits)))


def zero_word(group: GroupSpec, length: int) -> Word:
    return Word(group, (group.identity,) * length)


def parse_word(text: str, group: GroupSpec, length: int) -> Word:
    """Parse the CLI text form of a word.

    Single-factor groups with modulus <= 10 use contiguous digits
    ("012012...").  Everything else is comma-separated, one token per nit,
    with ':' joining the factor residues of a multi-factor element.
    """
    single_digit = len(group.moduli) == 1 and group.moduli[0] <= 10
    if single_digit:
        tokens = list(text)
    else:
        tokens = text.split(",") if text else []
    if len(tokens) != length:
        raise WordParseError(
            f"expected {length} nits, got {len(tokens)}", position=len(tokens) + 1
        )
    nits = []
    for pos, tok in enumerate(tokens, start=1):
        parts = [tok] if single_digit else tok.split(":")
        if len(parts) != len(group.moduli):
            raise WordParseError(
                f"nit {pos}: expected {len(group.moduli)} residues", position=pos
            )
        try:
            residues = tuple(int(p) for p in parts)
        except ValueError:
            raise WordParseError(f"nit {pos}: {tok!r} is not numeric", position=pos)
        if any(not (0 <= r < n) for r, n in zip(residues, group.moduli)):
            raise WordParseError(
                f"nit {pos}: {tok!r} out of range for {group}", position=pos
            )
        nits.append(residues)
    return Word(group, tuple(nits))


def word_to_text(w: Word) -> str:
    single_digit = len(w.group.moduli) == 1 and w.group.moduli[0] <= 10
    if single_digit:
        return "".join(str(nit[0]) for nit in w.nits)
    return ",".join(":".join(str(r) for r in nit) for nit in w.nits)


def word_to_int(w: Word) -> int:
    """Big-endian positional encoding, base |G|, leftmost nit most significant.

    For a single-factor Z_n this is the plain base-n value of the digit
    string; multi-factor nits contribute their element index.
    """
    g = w.group
    value = 0
    for nit in w.nits:
        value = value * g.order + g.elem_index(nit)
    return value


def int_to_word(value: int, group: GroupSpec, length: int) -> Word:
    if not (0 <= value < group.order**length):
        raise RangeError(
            f"{value} does not fit in {length} nits over {group}"
        )
    indices = []
    for _ in range(length):
        value, r = divmod(value, group.order)
        indices.append(r)
    return Word(group, tuple(group.elem_at(i) for i in reversed(indices)))


def split_halves(w: Word) -> tuple[Word, Word]:
    if w.length % 2:
        raise DimensionError(f"cannot split a word of odd length {w.length}")
    t = w.length // 2
    return Word(w.group, w.nits[:t]), Word(w.group, w.nits[t:])


def concat(a: Word, b: Word) -> Word:
    if a.group != b.group:
        raise DimensionError(f"group mismatch: {a.group} vs {b.group}")
    return Word(a.group, a.nits + b.nits)


def random_word(group: GroupSpec, length: int, rng: np.random.Generator) -> Word:
    nits = tuple(
        tuple(int(rng.integers(0, n)) for n in group.moduli) for _ in range(length)
    )
    return Word(group, nits)


def word_to_indices(w: Word) -> list[int]:
    """Nit-by-nit element indices; the engine's canonical digit view."""
    return [w.group.elem_index(nit) for nit in w.nits]


def word_from_indices(group: GroupSpec, indices) -> Word:
    return Word(group, tuple(group.elem_at(int(i)) for i in indices))


def pack_indices(indices, base: int) -> int:
    """Big-endian positional value of a digit sequence."""
    v = 0
    for i in indices:
        v = v * base + int(i)
    return v


def unpack_indices(value: int, base: int, length: int) -> list[int]:
    out = []
    for _ in range(length):
        value, r = divmod(value, base)
        out.append(r)
    return out[::-1]
