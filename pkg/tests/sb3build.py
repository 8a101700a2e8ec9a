"""Small builder for sb3 project.json documents used across the tests.

Keeps fixture construction readable: blocks are declared as Blk specs with
typed input helpers, chains become properly linked block dicts with ids,
next/parent pointers and topLevel flags.
"""

from __future__ import annotations

import json
from pathlib import Path


class Blk:
    def __init__(self, opcode: str, fields: dict | None = None, inputs: dict | None = None):
        self.opcode = opcode
        self.fields = fields or {}
        self.inputs = inputs or {}


def num(value) -> tuple:
    return ("prim", [4, str(value)])


def text(value) -> tuple:
    return ("prim", [10, str(value)])


def bcast(name: str) -> tuple:
    return ("prim", [11, name, f"bc_{name}"])


def varref(name: str) -> tuple:
    return ("varprim", [12, name, f"var_{name}"])


def block_in(blk: Blk) -> tuple:
    return ("block", blk)


def stack(*blks: Blk) -> tuple:
    return ("stack", list(blks))


def menu(opcode: str, field_name: str, value: str) -> tuple:
    return ("shadow", Blk(opcode, fields={field_name: value}))


class _Emitter:
    def __init__(self):
        self.blocks: dict[str, dict] = {}
        self.counter = 0

    def fresh(self) -> str:
        self.counter += 1
        return f"b{self.counter}"

    def emit_chain(self, blks: list[Blk], parent: str | None, top: bool, xy=(0, 0)):
        ids = [self.fresh() for _ in blks]
        for i, blk in enumerate(blks):
            entry = self.emit_block(blk, ids[i])
            entry["parent"] = parent if i == 0 else ids[i - 1]
            entry["next"] = ids[i + 1] if i + 1 < len(blks) else None
            entry["topLevel"] = top and i == 0
            if entry["topLevel"]:
                entry["x"], entry["y"] = xy
        return ids[0] if ids else None

    def emit_block(self, blk: Blk, bid: str) -> dict:
        entry = {
            "opcode": blk.opcode,
            "next": None,
            "parent": None,
            "inputs": {},
            "fields": {},
            "shadow": False,
            "topLevel": False,
        }
        for name, value in blk.fields.items():
            if isinstance(value, (list, tuple)):
                entry["fields"][name] = list(value)
            else:
                entry["fields"][name] = [value, None]
        for name, (kind, payload) in blk.inputs.items():
            if kind == "prim":
                entry["inputs"][name] = [1, payload]
            elif kind == "varprim":
                entry["inputs"][name] = [3, payload, [10, ""]]
            elif kind == "block":
                cid = self.fresh()
                child = self.emit_block(payload, cid)
                child["parent"] = bid
                entry["inputs"][name] = [2, cid]
            elif kind == "shadow":
                cid = self.fresh()
                child = self.emit_block(payload, cid)
                child["parent"] = bid
                child["shadow"] = True
                entry["inputs"][name] = [1, cid]
            elif kind == "stack":
                head = self.emit_chain(payload, parent=bid, top=False)
                if head is not None:
                    entry["inputs"][name] = [2, head]
            else:
                raise ValueError(kind)
        self.blocks[bid] = entry
        return entry


def target(
    name: str,
    *scripts: list[Blk],
    is_stage: bool = False,
    variables: dict | None = None,
    lists: dict | None = None,
    broadcasts: list[str] | None = None,
    loose_reporter: str | None = None,
) -> dict:
    emitter = _Emitter()
    for i, chain in enumerate(scripts):
        emitter.emit_chain(list(chain), parent=None, top=True, xy=(40 * i, 60 * i))
    if loose_reporter is not None:
        emitter.blocks[emitter.fresh()] = [12, loose_reporter, f"var_{loose_reporter}", 10, 10]
    return {
        "isStage": is_stage,
        "name": name,
        "variables": {f"var_{k}": [k, v] for k, v in (variables or {}).items()},
        "lists": {f"list_{k}": [k, v] for k, v in (lists or {}).items()},
        "broadcasts": {f"bc_{k}": k for k in (broadcasts or [])},
        "blocks": emitter.blocks,
        "comments": {},
        "currentCostume": 0,
        "costumes": [],
        "sounds": [],
        "volume": 100,
        "layerOrder": 0,
    }


def stage(*scripts, **kwargs) -> dict:
    return target("Stage", *scripts, is_stage=True, **kwargs)


def project_doc(*targets: dict) -> dict:
    return {
        "targets": list(targets),
        "monitors": [],
        "extensions": [],
        "meta": {"semver": "3.0.0", "vm": "1.2.0", "agent": ""},
    }


def write_project(path: str | Path, doc: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(doc))
    return path
