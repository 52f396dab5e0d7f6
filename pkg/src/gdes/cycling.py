"""Orbit, closure, purity, walk, and subgroup-bound experiments.

Orbits are computed by iterating the probed permutation until it returns
to the start state (a permutation's orbit through a point is the cycle
through it), in O(1) memory.  Runs proceed in chunks so long experiments
can checkpoint to a sidecar file and resume.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from ._tables import index_add_matrix
from .errors import CapacityError, SpecValidationError
from .permnet import CipherSpec
from .sbox import SBoxRoundSpec, _col_positions, _row_positions
from .words import Word, int_to_word, word_to_int

DEFAULT_MAX_STEPS = 2**32
CHECKPOINT_EVERY = 10**7

REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class OrbitResult:
    """One completed or truncated orbit probe."""

    start: int
    keys: tuple[int, ...]
    length: int | None
    steps_taken: int
    truncated: bool
    wall_time: float

    def as_dict(self) -> dict:
        return {
            "start": self.start,
            "keys": list(self.keys),
            "length": self.length,
            "steps_taken": self.steps_taken,
            "truncated": self.truncated,
            "wall_time": round(self.wall_time, 3),
        }


@dataclass(frozen=True)
class ExperimentReport:
    probes: tuple[OrbitResult, ...]
    lcm: int
    threshold: int
    key_space: int | None
    verdict: str

    @classmethod
    def build(
        cls,
        probes: Sequence[OrbitResult],
        threshold: int,
        key_space: int | None = None,
    ) -> ExperimentReport:
        lengths = [p.length for p in probes if not p.truncated]
        value = math.lcm(*lengths) if lengths else 1
        refuted = bool(lengths) and value > threshold and not any(
            p.truncated for p in probes
        )
        return cls(
            probes=tuple(probes),
            lcm=value,
            threshold=threshold,
            key_space=key_space,
            verdict=REFUTED if refuted else INCONCLUSIVE,
        )

    @classmethod
    def from_lengths(cls, lengths: Sequence[int], threshold: int) -> ExperimentReport:
        """Report over injected orbit lengths (no cipher runs)."""
        probes = tuple(
            OrbitResult(start=-1, keys=(), length=int(n), steps_taken=int(n),
                        truncated=False, wall_time=0.0)
            for n in lengths
        )
        return cls.build(probes, threshold)

    def as_dict(self) -> dict:
        return {
            "probes": [p.as_dict() for p in self.probes],
            "lcm": self.lcm,
            "threshold": self.threshold,
            "key_space": self.key_space,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class WalkReport:
    seed: int
    start: int
    tail: int | None
    cycle: int | None
    steps_taken: int
    truncated: bool
    size_estimate: int | None

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "start": self.start,
            "tail": self.tail,
            "cycle": self.cycle,
            "steps_taken": self.steps_taken,
            "truncated": self.truncated,
            "size_estimate": self.size_estimate,
        }


@dataclass(frozen=True)
class SubgroupBoundResult:
    """Statistical lower bound on the order of the generated group."""

    bound: int
    generator_keys: tuple[int, ...]
    probes: tuple[OrbitResult, ...]
    truncated_probes: int

    def as_dict(self) -> dict:
        return {
            "bound": self.bound,
            "generator_keys": list(self.generator_keys),
            "probes": [p.as_dict() for p in self.probes],
            "truncated_probes": self.truncated_probes,
        }


class CheckpointFile:
    """Sidecar JSON with (start, current, step count) for one running probe."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def load(self) -> dict | None:
        if not self.path.exists():
            return None
        with open(self.path) as fh:
            return json.load(fh)

    def save(self, payload: dict) -> None:
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        with open(tmp, "w") as fh:
            json.dump(payload, fh)
        os.replace(tmp, self.path)


def _run_program_orbit(
    program: _kernels.Program,
    start_msg: Word,
    key_ints: tuple[int, ...],
    max_steps: int,
    checkpoint: CheckpointFile | None = None,
    resume: bool = False,
    checkpoint_every: int = CHECKPOINT_EVERY,
) -> OrbitResult:
    spec = program.spec
    start_int = word_to_int(start_msg)
    l0, r0 = _kernels.state_from_word(spec, start_msg)
    left, right = l0, r0
    done = 0
    digest = program.digest()
    if checkpoint is not None and resume:
        payload = checkpoint.load()
        if payload is not None:
            if payload.get("program") != digest or payload.get("start") != start_int:
                raise SpecValidationError(
                    "checkpoint does not match this probe; refusing to resume"
                )
            done = int(payload["steps"])
            cur = int_to_word(int(payload["current"]), spec.group, spec.block_length)
            left, right = _kernels.state_from_word(spec, cur)
    t0 = time.perf_counter()
    hit = False
    while not hit and done < max_steps:
        chunk = min(checkpoint_every, max_steps - done)
        hit, steps, left, right = _kernels.orbit_chunk(
            np.int64(left),
            np.int64(right),
            np.int64(l0),
            np.int64(r0),
            program.ops,
            program.tbl,
            program.f,
            program.addh,
            program.addl,
            program.subh,
            program.subl,
            np.int64(program.split),
            np.int64(program.high),
            np.int64(chunk),
        )
        done += int(steps)
        if checkpoint is not None and not hit:
            current = word_to_int(_kernels.word_from_state(spec, int(left), int(right)))
            checkpoint.save(
                {
                    "program": digest,
                    "start": start_int,
                    "current": current,
                    "steps": done,
                    "keys": list(key_ints),
                }
            )
    wall = time.perf_counter() - t0
    return OrbitResult(
        start=start_int,
        keys=key_ints,
        length=done if hit else None,
        steps_taken=done,
        truncated=not hit,
        wall_time=wall,
    )


def orbit_length(
    spec: CipherSpec,
    key: Word | None,
    m: Word,
    max_steps: int = DEFAULT_MAX_STEPS,
    checkpoint: CheckpointFile | None = None,
    resume: bool = False,
) -> OrbitResult:
    """Length of the cycle of T_key through m (truncated at max_steps)."""
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    program = _kernels.compile_program(spec, [(key, False)])
    keys = (word_to_int(spec.validate_key(key)),) if spec.is_keyed else ()
    return _run_program_orbit(program, m, keys, max_steps, checkpoint, resume)


def purity_probe(
    spec: CipherSpec,
    k_ref: Word,
    key: Word,
    m: Word,
    max_steps: int = DEFAULT_MAX_STEPS,
    checkpoint: CheckpointFile | None = None,
    resume: bool = False,
) -> OrbitResult:
    """Orbit of the composed permutation T_k_ref^-1 o T_key through m."""
    program = _kernels.compile_program(spec, [(key, False), (k_ref, True)])
    keys = (word_to_int(key), word_to_int(k_ref))
    return _run_program_orbit(program, m, keys, max_steps, checkpoint, resume)


def _pool_size(threads: int | None) -> int:
    return threads if threads and threads > 0 else (os.cpu_count() or 1)


def closure_refute(
    spec: CipherSpec,
    probes: Sequence[tuple[Word, Word]],
    max_steps: int = DEFAULT_MAX_STEPS,
    threshold: int | None = None,
    threads: int | None = None,
    checkpoint_base: str | Path | None = None,
    resume: bool = False,
) -> ExperimentReport:
    """Run (key, message) orbit probes; refuted when lcm exceeds the threshold.

    The threshold defaults to |K| but stays configurable; the key space is
    always reported alongside.
    """
    if not probes:
        raise ValueError("need at least one probe")
    key_space = spec.key_space_size
    threshold = key_space if threshold is None else threshold

    def run(item):
        idx, (key, msg) = item
        cp = (
            CheckpointFile(f"{checkpoint_base}.probe{idx}.json")
            if checkpoint_base is not None
            else None
        )
        return orbit_length(spec, key, msg, max_steps, cp, resume)

    with ThreadPoolExecutor(max_workers=_pool_size(threads)) as pool:
        results = list(pool.map(run, enumerate(probes)))
    return ExperimentReport.build(results, threshold, key_space)


def purity_refute(
    spec: CipherSpec,
    probes: Sequence[tuple[Word, Word, Word]],
    max_steps: int = DEFAULT_MAX_STEPS,
    threshold: int | None = None,
    threads: int | None = None,
) -> ExperimentReport:
    """Purity probes (k_ref, k, m); lcm > |K| refutes purity."""
    if not probes:
        raise ValueError("need at least one probe")
    key_space = spec.key_space_size
    threshold = key_space if threshold is None else threshold

    def run(item):
        k_ref, key, msg = item
        return purity_probe(spec, k_ref, key, msg, max_steps)

    with ThreadPoolExecutor(max_workers=_pool_size(threads)) as pool:
        results = list(pool.map(run, probes))
    return ExperimentReport.build(results, threshold, key_space)


def subgroup_lower_bound(
    spec: CipherSpec,
    generator_keys: Sequence[Word],
    probes: Sequence[tuple[Sequence[int], Word]],
    max_steps: int = DEFAULT_MAX_STEPS,
    threads: int | None = None,
) -> SubgroupBoundResult:
    """lcm of orbit lengths of composition words in the generators.

    Each probe is (word, m) where the word lists generator indices applied
    left to right.  Orbit lengths of group elements divide the group
    order, so the lcm is a lower bound on |<T_k1, ..., T_ks>|.
    """
    gens = list(generator_keys)
    if not gens or not probes:
        raise ValueError("need generators and probes")

    def run(item):
        word_idx, msg = item
        parts = [(gens[i], False) for i in word_idx]
        if not parts:
            raise ValueError("empty composition word")
        program = _kernels.compile_program(spec, parts)
        keys = tuple(word_to_int(gens[i]) for i in word_idx if gens[i] is not None)
        return _run_program_orbit(program, msg, keys, max_steps)

    with ThreadPoolExecutor(max_workers=_pool_size(threads)) as pool:
        results = list(pool.map(run, probes))
    lengths = [r.length for r in results if not r.truncated]
    bound = math.lcm(*lengths) if lengths else 1
    return SubgroupBoundResult(
        bound=bound,
        generator_keys=tuple(word_to_int(k) for k in gens if k is not None),
        probes=tuple(results),
        truncated_probes=sum(r.truncated for r in results),
    )


def _walk_arrays(spec: CipherSpec):
    rf = spec.round_fn
    if not isinstance(rf, SBoxRoundSpec):
        raise SpecValidationError("the keyed walk needs an S-box cipher")
    q = spec.group.order
    if q**spec.block_length > _kernels.STATE_LIMIT or spec.key_space_size > _kernels.STATE_LIMIT:
        raise CapacityError("walk state or key space exceeds 63-bit packing")
    p0 = np.array([s - 1 for s in spec.initial_perm.table], dtype=np.int64)
    pinv0 = np.array([s - 1 for s in spec.final_perm.table], dtype=np.int64)
    cp = np.array(
        [[s - 1 for s in m.table] for m in spec.key_schedule], dtype=np.int64
    ).reshape(spec.rounds, rf.subkey_length)
    exp0 = np.array([s - 1 for s in rf.expansion.table], dtype=np.int64)
    row_pos = np.array(_row_positions(rf.i, rf.j), dtype=np.int64)
    col_pos = np.array(_col_positions(rf.i, rf.j), dtype=np.int64)
    boxes = np.stack([b.as_array().reshape(-1) for b in rf.boxes]).astype(np.int64)
    idx_add = index_add_matrix(spec.group)
    return p0, pinv0, cp, exp0, row_pos, col_pos, boxes, q**rf.j, rf.j, idx_add


def walk_step(spec: CipherSpec, seed: int, x: int) -> int:
    """Pure-Python twin of the kernel walk step, for replay verification."""
    from .permnet import gdes_encrypt

    key_int = _kernels.mix64((x + seed) % 2**64) % spec.key_space_size
    key = int_to_word(key_int, spec.group, spec.key_length)
    msg = int_to_word(x, spec.group, spec.block_length)
    return word_to_int(gdes_encrypt(spec, key, msg))


def random_walk_closure(
    spec: CipherSpec,
    seed: int,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> WalkReport:
    """Pseudorandom walk x -> T_h(x)(x) with Brent cycle detection.

    Reports tail and cycle lengths plus the birthday-style size estimate
    (tail + cycle)^2 for the walked permutation set.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    rng = np.random.default_rng(seed)
    start = int(rng.integers(0, spec.domain_size))
    if not spec.is_keyed:
        # keyless ciphers walk a fixed permutation: tail 0, cycle = orbit
        msg = int_to_word(start, spec.group, spec.block_length)
        res = orbit_length(spec, None, msg, max_steps)
        return WalkReport(
            seed=seed,
            start=start,
            tail=None if res.truncated else 0,
            cycle=res.length,
            steps_taken=res.steps_taken,
            truncated=res.truncated,
            size_estimate=None if res.truncated else res.length**2,
        )
    arrays = _walk_arrays(spec)
    p0, pinv0, cp, exp0, row_pos, col_pos, boxes, n_cols, j_width, idx_add = arrays
    found, mu, lam, steps = _kernels.brent_walk(
        np.int64(start),
        np.uint64(seed),
        np.int64(max_steps),
        np.int64(spec.group.order),
        np.int64(spec.t),
        np.int64(spec.key_length),
        np.int64(spec.key_space_size),
        bool(spec.final_swap),
        p0,
        pinv0,
        cp,
        exp0,
        row_pos,
        col_pos,
        boxes,
        np.int64(n_cols),
        np.int64(j_width),
        idx_add,
    )
    if not found:
        return WalkReport(seed, start, None, None, int(steps), True, None)
    return WalkReport(
        seed=seed,
        start=start,
        tail=int(mu),
        cycle=int(lam),
        steps_taken=int(steps),
        truncated=False,
        size_estimate=(int(mu) + int(lam)) ** 2,
    )


def verify_walk(spec: CipherSpec, report: WalkReport) -> bool:
    """Replay the walk in pure Python and check x_tail == x_(tail+cycle)."""
    if report.truncated:
        return False
    x = report.start
    for _ in range(report.tail):
        x = walk_step(spec, report.seed, x)
    a = x
    for _ in range(report.cycle):
        x = walk_step(spec, report.seed, x)
    return a == x
