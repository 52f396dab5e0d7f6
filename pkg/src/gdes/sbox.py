"""S-box tables, the S-box round function, generation, auditing, expansion.

Lookup convention for an (i+j)-nit input block: the first ceil(i/2) nits
followed by the last floor(i/2) nits select the row (base-|G|, big-endian);
the middle j nits select the column.  At i=2, j=3 this is the classic
(n1, n5) row / (n2, n3, n4) column rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ._tables import digit_matrix as _digit_matrix
from ._tables import index_add_matrix, index_sub_matrix
from .errors import CapacityError, DimensionError, SpecValidationError
from .groups import GroupElem, GroupSpec
from .permnet import CipherSpec, WireMap
from .words import (
    Word,
    concat,
    pack_indices,
    unpack_indices,
    word_add,
    word_from_indices,
    word_to_indices,
)

AFFINE_TEST_LIMIT = 10**6


def _row_positions(i: int, j: int) -> list[int]:
    lead = (i + 1) // 2
    trail = i // 2
    span = i + j
    return list(range(lead)) + list(range(span - trail, span))


def _col_positions(i: int, j: int) -> list[int]:
    lead = (i + 1) // 2
    return list(range(lead, lead + j))


@dataclass(frozen=True)
class SBox:
    """|G|^i rows by |G|^j columns of packed j-nit entries."""

    group: GroupSpec
    i: int
    j: int
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        rows, cols = self.group.order**self.i, self.group.order**self.j
        if len(table) != rows or any(len(r) != cols for r in table):
            raise DimensionError(f"S-box must be {rows}x{cols}")
        if any(not (0 <= v < cols) for r in table for v in r):
            raise ValueError(f"S-box entries must lie in [0, {cols})")
        object.__setattr__(self, "table", table)

    @property
    def n_rows(self) -> int:
        return self.group.order**self.i

    @property
    def n_cols(self) -> int:
        return self.group.order**self.j

    def as_array(self) -> np.ndarray:
        return np.array(self.table, dtype=np.int64)


def sbox_lookup(box: SBox, block: Word) -> Word:
    """Select and return the j-nit entry addressed by an (i+j)-nit block."""
    span = box.i + box.j
    if block.length != span or block.group != box.group:
        raise DimensionError(f"block must be {span} nits over {box.group}")
    digits = word_to_indices(block)
    q = box.group.order
    row = pack_indices([digits[p] for p in _row_positions(box.i, box.j)], q)
    col = pack_indices([digits[p] for p in _col_positions(box.i, box.j)], q)
    entry = box.table[row][col]
    return word_from_indices(box.group, unpack_indices(entry, q, box.j))


@dataclass(frozen=True)
class SBoxRoundSpec:
    """Round function built from n S-boxes behind an expansion map.

    Evaluates f(R, K) = the concatenated box outputs addressed by the
    consecutive (i+j)-nit blocks of K + E(R); requires t = j * n_boxes.
    """

    boxes: tuple[SBox, ...]
    expansion: WireMap

    def __post_init__(self):
        boxes = tuple(self.boxes)
        if not boxes:
            raise SpecValidationError("need at least one S-box")
        first = boxes[0]
        if any(
            (b.group, b.i, b.j) != (first.group, first.i, first.j) for b in boxes
        ):
            raise SpecValidationError("S-boxes must share group and dimensions")
        object.__setattr__(self, "boxes", boxes)
        t = first.j * len(boxes)
        want = (first.i + first.j) * len(boxes)
        if self.expansion.in_length != t or self.expansion.out_length != want:
            raise SpecValidationError(
                f"expansion must be {t}->{want}, got "
                f"{self.expansion.in_length}->{self.expansion.out_length}"
            )

    @property
    def group(self) -> GroupSpec:
        return self.boxes[0].group

    @property
    def i(self) -> int:
        return self.boxes[0].i

    @property
    def j(self) -> int:
        return self.boxes[0].j

    @property
    def n_boxes(self) -> int:
        return len(self.boxes)

    @property
    def t(self) -> int:
        return self.j * self.n_boxes

    @property
    def subkey_length(self) -> int:
        return (self.i + self.j) * self.n_boxes

    def evaluate(self, right: Word, subkey: Word) -> Word:
        if right.length != self.t or right.group != self.group:
            raise DimensionError(f"right half must be {self.t} nits")
        if subkey is None or subkey.length != self.subkey_length:
            raise DimensionError(f"subkey must be {self.subkey_length} nits")
        mixed = word_add(subkey, self.expansion.apply(right))
        span = self.i + self.j
        out = None
        for s, box in enumerate(self.boxes):
            block = Word(self.group, mixed.nits[s * span : (s + 1) * span])
            piece = sbox_lookup(box, block)
            out = piece if out is None else concat(out, piece)
        return out

    def packed_table(self, subkey: Word) -> np.ndarray:
        """f(R, subkey) over all R, on packed indices (vectorized)."""
        if subkey is None or subkey.length != self.subkey_length:
            raise DimensionError(f"subkey must be {self.subkey_length} nits")
        q = self.group.order
        digits = _digit_matrix(q, self.t)
        e_idx = np.array([s - 1 for s in self.expansion.table])
        sk = np.array(word_to_indices(subkey), dtype=np.int64)
        mixed = index_add_matrix(self.group)[digits[:, e_idx], sk[None, :]]
        span = self.i + self.j
        row_pos = _row_positions(self.i, self.j)
        col_pos = _col_positions(self.i, self.j)
        out = np.zeros(digits.shape[0], dtype=np.int64)
        for s, box in enumerate(self.boxes):
            block = mixed[:, s * span : (s + 1) * span]
            row = np.zeros(digits.shape[0], dtype=np.int64)
            for p in row_pos:
                row = row * q + block[:, p]
            col = np.zeros(digits.shape[0], dtype=np.int64)
            for p in col_pos:
                col = col * q + block[:, p]
            out = out * q**self.j + box.as_array()[row, col]
        return out


def round_function_f(spec: SBoxRoundSpec, right: Word, subkey: Word) -> Word:
    return spec.evaluate(right, subkey)


def sbox_cells_used(spec: SBoxRoundSpec, right: Word, subkey: Word) -> list[tuple[int, int, int]]:
    """(box index, row, col) triples addressed by one round-function call."""
    mixed = word_add(subkey, spec.expansion.apply(right))
    digits = word_to_indices(mixed)
    q = spec.group.order
    span = spec.i + spec.j
    row_pos = _row_positions(spec.i, spec.j)
    col_pos = _col_positions(spec.i, spec.j)
    cells = []
    for s in range(spec.n_boxes):
        block = digits[s * span : (s + 1) * span]
        row = pack_indices([block[p] for p in row_pos], q)
        col = pack_indices([block[p] for p in col_pos], q)
        cells.append((s, row, col))
    return cells


def sbox_generate(
    group: GroupSpec,
    i: int,
    j: int,
    seed: int,
    enforce_row_surjective: bool = False,
) -> SBox:
    """Deterministic random S-box; surjective rows are random permutations."""
    rng = np.random.default_rng(seed)
    rows, cols = group.order**i, group.order**j
    if enforce_row_surjective:
        table = tuple(tuple(int(v) for v in rng.permutation(cols)) for _ in range(rows))
    else:
        table = tuple(
            tuple(int(v) for v in rng.integers(0, cols, size=cols)) for _ in range(rows)
        )
    return SBox(group, i, j, table)


@dataclass(frozen=True)
class RowAudit:
    row: int
    surjective: bool
    missing: tuple[int, ...]
    duplicated: tuple[int, ...]


@dataclass(frozen=True)
class SBoxAudit:
    affine: bool
    rows: tuple[RowAudit, ...]

    @property
    def all_rows_surjective(self) -> bool:
        return all(r.surjective for r in self.rows)

    def as_dict(self) -> dict:
        return {
            "affine": self.affine,
            "all_rows_surjective": self.all_rows_surjective,
            "rows": [
                {
                    "row": r.row,
                    "surjective": r.surjective,
                    "missing": list(r.missing),
                    "duplicated": list(r.duplicated),
                }
                for r in self.rows
            ],
        }


def _full_map(box: SBox) -> np.ndarray:
    """The (i+j)-nit -> j-nit map induced by the lookup convention."""
    q = box.group.order
    span = box.i + box.j
    digits = _digit_matrix(q, span)
    row = np.zeros(digits.shape[0], dtype=np.int64)
    for p in _row_positions(box.i, box.j):
        row = row * q + digits[:, p]
    col = np.zeros(digits.shape[0], dtype=np.int64)
    for p in _col_positions(box.i, box.j):
        col = col * q + digits[:, p]
    return box.as_array()[row, col]


def _is_affine(box: SBox) -> bool:
    """Exhaustive affineness of the induced map F.

    F is affine iff G(x) = F(x) - F(0) is a homomorphism; a map on a
    product group is a homomorphism iff it respects addition of every
    single-position unit generator at every point, so checking all
    (x, generator) pairs is equivalent to checking all (x, y) pairs.
    """
    group = box.group
    q = group.order
    span = box.i + box.j
    domain = q**span
    if domain > AFFINE_TEST_LIMIT:
        raise CapacityError(f"affineness test over {domain} inputs exceeds the guard")
    fv = _full_map(box)
    out_digits = _digit_matrix(q, box.j)
    sub = index_sub_matrix(group)
    add = index_add_matrix(group)
    g_digits = sub[out_digits[fv], out_digits[fv[0]][None, :]]
    in_digits = _digit_matrix(q, span)
    powers = q ** np.arange(span - 1, -1, -1, dtype=np.int64)
    for pos in range(span):
        for fac_idx, mod in enumerate(group.moduli):
            gen_elem = tuple(1 if k == fac_idx else 0 for k in range(len(group.moduli)))
            gen_nit = group.elem_index(gen_elem)
            gen_word = [0] * span
            gen_word[pos] = gen_nit
            gen_packed = int(np.dot(gen_word, powers))
            shifted = in_digits.copy()
            shifted[:, pos] = add[shifted[:, pos], gen_nit]
            shifted_packed = shifted @ powers
            lhs = g_digits[shifted_packed]
            rhs = add[g_digits, g_digits[gen_packed][None, :]]
            if not np.array_equal(lhs, rhs):
                return False
    return True


def sbox_audit(box: SBox) -> SBoxAudit:
    """Design-criteria report: affineness and per-row surjectivity."""
    cols = box.n_cols
    rows = []
    for ri, row in enumerate(box.table):
        counts = np.bincount(np.array(row), minlength=cols)
        missing = tuple(int(v) for v in np.nonzero(counts == 0)[0])
        duplicated = tuple(int(v) for v in np.nonzero(counts > 1)[0])
        rows.append(RowAudit(ri, not missing and not duplicated, missing, duplicated))
    return SBoxAudit(affine=_is_affine(box), rows=tuple(rows))


def check_embedding(
    g: GroupSpec, h: GroupSpec, embedding: Mapping[GroupElem, GroupElem]
) -> None:
    """Require an injective homomorphism G -> H, exhaustively."""
    elems = list(g.elements())
    if sorted(embedding.keys()) != sorted(elems):
        raise SpecValidationError("embedding must be defined on every element of G")
    images = []
    for e in elems:
        h.validate(embedding[e])
        images.append(embedding[e])
    if len(set(images)) != len(images):
        raise SpecValidationError("embedding is not injective")
    for a in elems:
        for b in elems:
            if embedding[g.add(a, b)] != h.add(embedding[a], embedding[b]):
                raise SpecValidationError(
                    f"embedding is not a homomorphism at {a} + {b}"
                )


def scaling_embedding(g: GroupSpec, h: GroupSpec, factor: int) -> dict[GroupElem, GroupElem]:
    """The map x -> factor*x between single-factor groups, e.g. Z3 -> Z9."""
    if len(g.moduli) != 1 or len(h.moduli) != 1:
        raise SpecValidationError("scaling embeddings need single-factor groups")
    return {(x,): ((x * factor) % h.moduli[0],) for x in range(g.moduli[0])}


def _smallest_outside(h: GroupSpec, j: int, image_indices: set[int]) -> int:
    """Smallest packed j-nit value with some nit outside the embedded image."""
    q = h.order
    for v in range(q**j):
        if any(d not in image_indices for d in unpack_indices(v, q, j)):
            return v
    raise SpecValidationError("embedding is surjective; nothing to expand into")


def sbox_expand(
    box: SBox, h: GroupSpec, embedding: Mapping[GroupElem, GroupElem]
) -> SBox:
    """Expand a G-box to an H-box along an injective homomorphism G -> H.

    Cells addressed by embedded rows and columns carry the embedded
    original entries; every new cell holds the smallest packed value whose
    nit string leaves the embedded image.
    """
    g = box.group
    check_embedding(g, h, embedding)
    if h.order <= g.order:
        raise SpecValidationError("target group must be strictly larger")
    qg, qh = g.order, h.order
    phi = [h.elem_index(embedding[g.elem_at(k)]) for k in range(qg)]
    fill = _smallest_outside(h, box.j, set(phi))
    new = [[fill] * qh**box.j for _ in range(qh**box.i)]
    for grow in range(qg**box.i):
        hrow = pack_indices([phi[d] for d in unpack_indices(grow, qg, box.i)], qh)
        for gcol in range(qg**box.j):
            hcol = pack_indices([phi[d] for d in unpack_indices(gcol, qg, box.j)], qh)
            entry = box.table[grow][gcol]
            new[hrow][hcol] = pack_indices(
                [phi[d] for d in unpack_indices(entry, qg, box.j)], qh
            )
    return SBox(h, box.i, box.j, tuple(tuple(r) for r in new))


def embed_word(w: Word, h: GroupSpec, embedding: Mapping[GroupElem, GroupElem]) -> Word:
    return Word(h, tuple(embedding[nit] for nit in w.nits))


def expand_cipher(
    spec: CipherSpec, h: GroupSpec, embedding: Mapping[GroupElem, GroupElem]
) -> CipherSpec:
    """The same cipher wiring with every S-box expanded from G to H."""
    if not isinstance(spec.round_fn, SBoxRoundSpec):
        raise SpecValidationError("only S-box ciphers can be expanded")
    rf = spec.round_fn
    boxes = tuple(sbox_expand(b, h, embedding) for b in rf.boxes)
    return CipherSpec(
        group=h,
        t=spec.t,
        rounds=spec.rounds,
        initial_perm=spec.initial_perm,
        key_length=spec.key_length,
        key_schedule=spec.key_schedule,
        round_fn=SBoxRoundSpec(boxes, rf.expansion),
        final_swap=spec.final_swap,
    )


def random_cipher_spec(
    group: GroupSpec,
    seed: int,
    *,
    t: int = 4,
    rounds: int = 2,
    n_boxes: int = 2,
    i: int = 2,
    key_length: int = 10,
    enforce_row_surjective: bool = True,
) -> CipherSpec:
    """A random DES-like instance; defaults give the 2-round, 8-nit-block shape
    used for the closure experiments (two S-boxes, 10-nit key)."""
    if t % n_boxes:
        raise SpecValidationError("t must be divisible by n_boxes")
    j = t // n_boxes
    sk_len = (i + j) * n_boxes
    if sk_len > key_length:
        raise SpecValidationError("key must be at least subkey length")
    rng = np.random.default_rng(seed)
    initial = WireMap(2 * t, tuple(int(v) + 1 for v in rng.permutation(2 * t)))
    sources = list(rng.permutation(t) + 1) + list(rng.integers(1, t + 1, size=sk_len - t))
    expansion = WireMap(t, tuple(int(sources[v]) for v in rng.permutation(sk_len)))
    schedule = tuple(
        WireMap(
            key_length,
            tuple(int(v) + 1 for v in rng.choice(key_length, size=sk_len, replace=False)),
        )
        for _ in range(rounds)
    )
    boxes = tuple(
        sbox_generate(
            group,
            i,
            j,
            seed=int(rng.integers(0, 2**63)),
            enforce_row_surjective=enforce_row_surjective,
        )
        for _ in range(n_boxes)
    )
    return CipherSpec(
        group=group,
        t=t,
        rounds=rounds,
        initial_perm=initial,
        key_length=key_length,
        key_schedule=schedule,
        round_fn=SBoxRoundSpec(boxes, expansion),
        final_swap=True,
    )
