"""Load and save cipher specs as JSON documents.

Structure is checked with a JSON schema (errors carry JSON-pointer paths);
the semantic constraints are enforced by the domain constructors and
re-raised with the offending pointer where known.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import jsonschema

from .edes import edes_spec
from .errors import GdesError, SpecValidationError
from .groups import GroupSpec
from .permnet import CipherSpec, ExplicitRoundFunction, WireMap
from .sbox import SBox, SBoxRoundSpec

PRESETS = {"edes": edes_spec}

_POSITIONS = {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "preset": {"type": "string"},
        "group": {
            "type": "object",
            "properties": {
                "moduli": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 2},
                    "minItems": 1,
                }
            },
            "required": ["moduli"],
        },
        "t": {"type": "integer", "minimum": 1},
        "rounds": {"type": "integer", "minimum": 0},
        "key_length": {"type": "integer", "minimum": 0},
        "initial_perm": _POSITIONS,
        "final_swap": {"type": "boolean"},
        "key_schedule": {"type": "array", "items": _POSITIONS},
        "round_fn": {
            "type": "object",
            "properties": {
                "type": {"enum": ["sbox", "table"]},
                "expansion": _POSITIONS,
                "i": {"type": "integer", "minimum": 1},
                "j": {"type": "integer", "minimum": 1},
                "boxes": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                },
                "tables": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                },
            },
            "required": ["type"],
        },
    },
    "additionalProperties": False,
}

_FULL_FIELDS = ("group", "t", "rounds", "key_length", "initial_perm", "final_swap",
                "key_schedule", "round_fn")


def spec_from_dict(doc: dict) -> CipherSpec:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        pointer = "/" + "/".join(str(p) for p in exc.absolute_path)
        raise SpecValidationError(f"{pointer or '/'}: {exc.message}") from None
    if "preset" in doc:
        name = doc["preset"]
        if name not in PRESETS:
            raise SpecValidationError(f"/preset: unknown preset {name!r}")
        return PRESETS[name]()
    missing = [f for f in _FULL_FIELDS if f not in doc]
    if missing:
        raise SpecValidationError(f"/: missing fields {missing}")
    group = GroupSpec(tuple(doc["group"]["moduli"]))
    t = doc["t"]
    rf_doc = doc["round_fn"]
    try:
        if rf_doc["type"] == "sbox":
            for f in ("expansion", "i", "j", "boxes"):
                if f not in rf_doc:
                    raise SpecValidationError(f"/round_fn: missing {f!r}")
            i, j = rf_doc["i"], rf_doc["j"]
            cols = group.order**j
            boxes = []
            for bi, flat in enumerate(rf_doc["boxes"]):
                if len(flat) != group.order**i * cols:
                    raise SpecValidationError(
                        f"/round_fn/boxes/{bi}: expected "
                        f"{group.order**i}x{cols} row-major entries"
                    )
                rows = tuple(
                    tuple(flat[r * cols : (r + 1) * cols])
                    for r in range(group.order**i)
                )
                boxes.append(SBox(group, i, j, rows))
            round_fn: object = SBoxRoundSpec(
                tuple(boxes), WireMap(t, tuple(rf_doc["expansion"]))
            )
        else:
            if "tables" not in rf_doc:
                raise SpecValidationError("/round_fn: missing 'tables'")
            round_fn = tuple(
                ExplicitRoundFunction(group, t, tuple(tab))
                for tab in rf_doc["tables"]
            )
        return CipherSpec(
            group=group,
            t=t,
            rounds=doc["rounds"],
            initial_perm=WireMap(2 * t, tuple(doc["initial_perm"])),
            key_length=doc["key_length"],
            key_schedule=tuple(
                WireMap(doc["key_length"], tuple(cp)) for cp in doc["key_schedule"]
            ),
            round_fn=round_fn,
            final_swap=doc["final_swap"],
        )
    except SpecValidationError:
        raise
    except (GdesError, ValueError) as exc:
        raise SpecValidationError(f"/: {exc}") from None


def spec_to_dict(spec: CipherSpec) -> dict:
    doc = {
        "group": {"moduli": list(spec.group.moduli)},
        "t": spec.t,
        "rounds": spec.rounds,
        "key_length": spec.key_length,
        "initial_perm": list(spec.initial_perm.table),
        "final_swap": spec.final_swap,
        "key_schedule": [list(cp.table) for cp in spec.key_schedule],
    }
    rf = spec.round_fn
    if isinstance(rf, SBoxRoundSpec):
        doc["round_fn"] = {
            "type": "sbox",
            "expansion": list(rf.expansion.table),
            "i": rf.i,
            "j": rf.j,
            "boxes": [[v for row in b.table for v in row] for b in rf.boxes],
        }
    else:
        doc["round_fn"] = {
            "type": "table",
            "tables": [list(erf.outputs) for erf in rf],
        }
    return doc


def load_spec(path: str | Path) -> CipherSpec:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecValidationError(f"{path}: not valid JSON ({exc})") from None
    return spec_from_dict(doc)


def save_spec(spec: CipherSpec, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(spec_to_dict(spec), fh, indent=1)
        fh.write("\n")


def builtin_edes_document() -> dict:
    """The shipped edes.json, as a dict."""
    with resources.files("gdes.data").joinpath("edes.json").open() as fh:
        return json.load(fh)
