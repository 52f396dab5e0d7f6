"""Finite abelian groups as direct products of cyclic groups.

Elements are residue vectors, one residue per cyclic factor; a plain Z_n
element is a 1-tuple.  All arithmetic is componentwise and pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterator

from .errors import InvalidElementError

GroupElem = tuple[int, ...]


@dataclass(frozen=True)
class GroupSpec:
    """A direct product Z_{n1} x ... x Z_{nm}, every modulus >= 2."""

    moduli: tuple[int, ...]

    def __post_init__(self):
        moduli = tuple(int(n) for n in self.moduli)
        if not moduli:
            raise ValueError("a group needs at least one cyclic factor")
        if any(n < 2 for n in moduli):
            raise ValueError(f"every modulus must be >= 2, got {moduli}")
        object.__setattr__(self, "moduli", moduli)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def exponent(self) -> int:
        """Least n with n*x = identity for all x (the lcm of the moduli)."""
        return math.lcm(*self.moduli)

    @property
    def identity(self) -> GroupElem:
        return (0,) * len(self.moduli)

    def elements(self) -> Iterator[GroupElem]:
        """All elements in index order (row-major over the factors)."""
        return product(*(range(n) for n in self.moduli))

    def validate(self, elem: GroupElem) -> None:
        if len(elem) != len(self.moduli) or any(
            not (0 <= int(r) < n) for r, n in zip(elem, self.moduli)
        ):
            raise InvalidElementError(f"{elem!r} is not an element of {self}")

    def add(self, a: GroupElem, b: GroupElem) -> GroupElem:
        self.validate(a)
        self.validate(b)
        return tuple((x + y) % n for x, y, n in zip(a, b, self.moduli))

    def neg(self, a: GroupElem) -> GroupElem:
        self.validate(a)
        return tuple((-x) % n for x, n in zip(a, self.moduli))

    def sub(self, a: GroupElem, b: GroupElem) -> GroupElem:
        return self.add(a, self.neg(b))

    def elem_index(self, elem: GroupElem) -> int:
        """Rank of ``elem`` in index order, in [0, order)."""
        self.validate(elem)
        idx = 0
        for r, n in zip(elem, self.moduli):
            idx = idx * n + int(r)
        return idx

    def elem_at(self, index: int) -> GroupElem:
        if not (0 <= index < self.order):
            raise InvalidElementError(f"index {index} out of range for {self}")
        residues = []
        for n in reversed(self.moduli):
            index, r = divmod(index, n)
            residues.append(r)
        return tuple(reversed(residues))

    def index_add(self, i: int, j: int) -> int:
        """Group addition expressed on element indices."""
        return self.elem_index(self.add(self.elem_at(i), self.elem_at(j)))

    def __str__(self) -> str:
        return "x".join(f"Z{n}" for n in self.moduli)


def cyclic(n: int) -> GroupSpec:
    """The cyclic group Z_n."""
    return GroupSpec((n,))


def gadd(spec: GroupSpec, a: GroupElem, b: GroupElem) -> GroupElem:
    return spec.add(a, b)


def gsub(spec: GroupSpec, a: GroupElem, b: GroupElem) -> GroupElem:
    return spec.sub(a, b)


def characteristic(spec: GroupSpec) -> int:
    """Least positive n such that n*x is the identity for every x."""
    return spec.exponent
