"""Scratch 3 ``project.json`` parsing and serialization.

Supported sb3 subset: block opcodes, next/parent chains, inputs (including
substacks and obscured shadows), fields, variables, lists, broadcasts and
custom blocks. Costumes, sounds, monitors and extension payloads are carried
through serialization untouched but play no role in the AST.

Input primitives are normalized as follows:

=========  ==========================================  =====================
sb3 code   meaning                                     AST representation
=========  ==========================================  =====================
4..8       number / angle literal                      ``lit:number`` leaf
9          color literal                               ``lit:string`` leaf
10         string literal                              ``lit:string`` leaf
11         broadcast                                   ``field:<name>`` leaf
12         variable reporter                           ``data_variable`` node
13         list reporter                               ``data_listcontents``
=========  ==========================================  =====================

Loose variable/list reporters stored as top-level arrays become scripts with
``has_hat = False``, like any other dangling block.
"""

from __future__ import annotations

import json
import zipfile
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import MalformedJson, NoStage, NotAScratchProject, UnserializableNode
from .model import (
    ELSE_SUBSTACK_LABEL,
    SCRIPT_LABEL,
    SUBSTACK_LABEL,
    Actor,
    Node,
    Program,
    Script,
    is_block_label,
    is_hat_opcode,
)

_ZIP_MAGIC = b"PK\x03\x04"

# slot names that carry take-the-whole-chain substack inputs
_SUBSTACK_SLOTS = {"SUBSTACK": SUBSTACK_LABEL, "SUBSTACK2": ELSE_SUBSTACK_LABEL}

# pseudo-slots for custom-block metadata (never real sb3 input/field keys)
_PROC_SLOT = "!proc"
_ARG_SLOT = "!arg"


class FileKind(Enum):
    SB3_ZIP = "sb3-zip"
    RAW_JSON = "raw-json"


@dataclass
class ProjectFile:
    path: Path
    kind: FileKind

    @classmethod
    def detect(cls, path: str | Path) -> "ProjectFile":
        path = Path(path)
        with open(path, "rb") as fh:
            magic = fh.read(4)
        kind = FileKind.SB3_ZIP if magic == _ZIP_MAGIC else FileKind.RAW_JSON
        return cls(path, kind)


def _read_project_bytes(file: ProjectFile) -> bytes:
    if file.kind is FileKind.SB3_ZIP:
        try:
            with zipfile.ZipFile(file.path) as zf:
                return zf.read("project.json")
        except (zipfile.BadZipFile, KeyError) as exc:
            raise MalformedJson(f"{file.path}: not a readable sb3 archive: {exc}")
    return file.path.read_bytes()


def _load_document(file: ProjectFile) -> dict:
    data = _read_project_bytes(file)
    try:
        doc = json.loads(data)
    except ValueError as exc:
        raise MalformedJson(f"{file.path}: {exc}")
    if not isinstance(doc, dict) or not isinstance(doc.get("targets"), list):
        raise NotAScratchProject(f"{file.path}: missing 'targets' array")
    return doc


def _escape_label(label: str) -> str:
    # "*" is reserved for pq-gram dummies
    return "\\*" if label == "*" else label


def _field_leaf(value: object, slot: str, kind: str, raw: list | None = None) -> Node:
    return Node(
        _escape_label(f"field:{value}"), slot=slot, slot_kind=kind, raw_prim=raw
    )


class _ActorParser:
    def __init__(self, blocks: dict):
        self.blocks = blocks

    def parse_scripts(self) -> list[Script]:
        scripts = []
        for block_id, blk in self.blocks.items():
            if isinstance(blk, list):
                # top-level compact primitive (dangling variable/list reporter)
                if len(blk) >= 5:
                    root = Node(SCRIPT_LABEL, [self._primitive_node(blk, None)])
                    scripts.append(Script(root, has_hat=False, script_index=0))
                continue
            if blk.get("topLevel"):
                scripts.append(self._parse_script(block_id))
        for i, script in enumerate(scripts):
            script.refresh(i)
        return scripts

    def _parse_script(self, head_id: str) -> Script:
        root = Node(SCRIPT_LABEL)
        self._append_chain(root, head_id)
        return Script(root, has_hat=False, script_index=0)

    def _append_chain(self, container: Node, head_id: str | None) -> None:
        seen = set()
        block_id = head_id
        while block_id is not None:
            if block_id in seen:
                raise NotAScratchProject(f"cycle in block chain at {block_id!r}")
            seen.add(block_id)
            blk = self.blocks.get(block_id)
            if blk is None:
                break
            container.children.append(self._parse_block(block_id, blk))
            block_id = blk.get("next") if isinstance(blk, dict) else None

    def _parse_block(self, block_id: str, blk: dict | list) -> Node:
        if isinstance(blk, list):
            return self._primitive_node(blk, None)
        opcode = _escape_label(str(blk.get("opcode", "")))
        node = Node(opcode, raw_ref=block_id, raw=blk)
        if opcode == "procedures_definition":
            self._parse_procedure_definition(node, blk)
            return node
        if opcode == "procedures_call":
            proccode = (blk.get("mutation") or {}).get("proccode", "")
            node.children.append(_field_leaf(proccode, _PROC_SLOT, "field"))
        for name in sorted((blk.get("fields") or {})):
            fval = blk["fields"][name]
            value = fval[0] if isinstance(fval, list) else fval
            node.children.append(_field_leaf(value, name, "field", raw=fval))
        inputs = blk.get("inputs") or {}
        plain = sorted(k for k in inputs if k not in _SUBSTACK_SLOTS)
        stacks = sorted(k for k in inputs if k in _SUBSTACK_SLOTS)
        for name in plain + stacks:
            child = self._parse_input(name, inputs[name])
            if child is not None:
                node.children.append(child)
        return node

    def _parse_input(self, name: str, arr: object) -> Node | None:
        if not isinstance(arr, list) or len(arr) < 2:
            return None
        value = arr[1]
        if isinstance(value, str):
            blk = self.blocks.get(value)
            if blk is None:
                return None
            if name in _SUBSTACK_SLOTS:
                container = Node(_SUBSTACK_SLOTS[name], slot=name)
                self._append_chain(container, value)
                return container
            child = self._parse_block(value, blk)
            child.slot = name
            return child
        if isinstance(value, list) and value:
            return self._primitive_node(value, name, input_arr=arr)
        return None

    def _primitive_node(
        self, prim: list, slot: str | None, input_arr: list | None = None
    ) -> Node:
        kind = prim[0]
        raw = input_arr if input_arr is not None else [1, prim]
        if kind in (12, 13):
            opcode = "data_variable" if kind == 12 else "data_listcontents"
            inner = "VARIABLE" if kind == 12 else "LIST"
            child = _field_leaf(prim[1], inner, "field")
            return Node(opcode, [child], slot=slot, raw_prim=raw)
        if kind == 11:
            return _field_leaf(prim[1], slot or "BROADCAST_INPUT", "input", raw=raw)
        label = "lit:number" if kind in (4, 5, 6, 7, 8) else "lit:string"
        return Node(label, slot=slot, slot_kind="input", raw_prim=raw)

    def _parse_procedure_definition(self, node: Node, blk: dict) -> None:
        # prototype collapses to field leaves: proccode, then parameter names
        inputs = blk.get("inputs") or {}
        proto_ref = inputs.get("custom_block")
        proto = None
        if isinstance(proto_ref, list) and len(proto_ref) >= 2:
            proto = self.blocks.get(proto_ref[1])
        mutation = (proto or {}).get("mutation") or {}
        node.children.append(
            _field_leaf(mutation.get("proccode", ""), _PROC_SLOT, "field")
        )
        try:
            argnames = json.loads(mutation.get("argumentnames", "[]"))
        except ValueError:
            argnames = []
        for i, argname in enumerate(argnames):
            node.children.append(_field_leaf(argname, f"{_ARG_SLOT}{i}", "field"))
        if proto is not None:
            reporters = {}
            for arr in (proto.get("inputs") or {}).values():
                if isinstance(arr, list) and len(arr) >= 2 and isinstance(arr[1], str):
                    rep = self.blocks.get(arr[1])
                    if rep is not None:
                        reporters[arr[1]] = rep
            node.raw_proto = {
                "id": proto_ref[1],
                "block": proto,
                "reporters": reporters,
            }


def parse_project(
    file: ProjectFile | str | Path, source_id: str | None = None
) -> Program:
    """Parse a project.json (raw or inside an .sb3 zip) into a Program."""
    if not isinstance(file, ProjectFile):
        file = ProjectFile.detect(file)
    doc = _load_document(file)
    targets = doc["targets"]
    stage_indices = [
        i for i, t in enumerate(targets) if isinstance(t, dict) and t.get("isStage")
    ]
    if not stage_indices:
        raise NoStage(f"{file.path}: no target with isStage")
    if len(stage_indices) > 1:
        raise NotAScratchProject(f"{file.path}: multiple stage targets")
    order = stage_indices + [i for i in range(len(targets)) if i not in stage_indices]

    actors: list[Actor] = []
    used_names: dict[str, int] = {}
    for idx in order:
        target = targets[idx]
        if not isinstance(target, dict):
            raise NotAScratchProject(f"{file.path}: target {idx} is not an object")
        name = str(target.get("name", ""))
        seen = used_names.get(name, 0) + 1
        used_names[name] = seen
        if seen > 1:
            name = f"{name}#{seen}"
        blocks = target.get("blocks") or {}
        if not isinstance(blocks, dict):
            raise NotAScratchProject(f"{file.path}: blocks of {name!r} not an object")
        scripts = _ActorParser(blocks).parse_scripts()
        actors.append(
            Actor(
                name=name,
                is_stage=bool(target.get("isStage")),
                scripts=scripts,
                raw_index=idx,
            )
        )
    return Program(actors=actors, source_id=source_id or file.path.stem)


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------


class _NameResolver:
    """Looks up variable/list/broadcast ids by name, creating missing ones
    on the stage."""

    def __init__(self, targets: list[dict]):
        self.targets = targets
        self.new_vars: dict[str, str] = {}
        self.new_lists: dict[str, str] = {}
        self.new_broadcasts: dict[str, str] = {}

    def _find(self, key: str, name: str) -> str | None:
        for target in self.targets:
            table = target.get(key) or {}
            for vid, entry in table.items():
                existing = entry[0] if isinstance(entry, list) else entry
                if existing == name:
                    return vid
        return None

    def variable_id(self, name: str) -> str:
        vid = self._find("variables", name)
        if vid is None:
            vid = self.new_vars.setdefault(name, f"var:{name}")
        return vid

    def list_id(self, name: str) -> str:
        vid = self._find("lists", name)
        if vid is None:
            vid = self.new_lists.setdefault(name, f"list:{name}")
        return vid

    def broadcast_id(self, name: str) -> str:
        vid = self._find("broadcasts", name)
        if vid is None:
            vid = self.new_broadcasts.setdefault(name, f"broadcast:{name}")
        return vid

    def apply_to_stage(self, stage_json: dict) -> None:
        variables = stage_json.setdefault("variables", {})
        for name, vid in self.new_vars.items():
            variables[vid] = [name, 0]
        lists = stage_json.setdefault("lists", {})
        for name, vid in self.new_lists.items():
            lists[vid] = [name, []]
        broadcasts = stage_json.setdefault("broadcasts", {})
        for name, vid in self.new_broadcasts.items():
            broadcasts[vid] = name


class _BlockWriter:
    def __init__(self, resolver: _NameResolver):
        self.resolver = resolver
        self.out: dict[str, dict] = {}
        self._counter = 0

    def fresh_id(self) -> str:
        self._counter += 1
        return f"hint{self._counter}"

    def block_id(self, node: Node) -> str:
        return node.raw_ref or self.fresh_id()

    def write_scripts(self, actor: Actor) -> dict[str, dict]:
        for script in actor.scripts:
            self.write_chain(script.root.children, parent_id=None, top_level=True)
        return self.out

    def write_chain(
        self, chain: list[Node], parent_id: str | None, top_level: bool
    ) -> str | None:
        ids = [self.block_id(node) for node in chain]
        head_id = ids[0] if ids else None
        prev_id = parent_id
        for i, node in enumerate(chain):
            if not is_block_label(node.label):
                raise UnserializableNode(
                    f"{node.label!r} cannot appear at statement position"
                )
            entry = self.write_block(node, ids[i])
            entry["parent"] = prev_id
            entry["next"] = ids[i + 1] if i + 1 < len(ids) else None
            entry["topLevel"] = top_level and i == 0
            if entry["topLevel"]:
                raw = node.raw or {}
                entry["x"] = raw.get("x", 0)
                entry["y"] = raw.get("y", 0)
            prev_id = ids[i]
        return head_id

    def write_block(self, node: Node, block_id: str) -> dict:
        raw = node.raw or {}
        entry = {
            "opcode": "*" if node.label == "\\*" else node.label,
            "next": None,
            "parent": None,
            "inputs": {},
            "fields": {},
            "shadow": bool(raw.get("shadow", False)),
            "topLevel": False,
        }
        if raw.get("mutation") and node.label not in (
            "procedures_call",
            "procedures_definition",
        ):
            entry["mutation"] = raw["mutation"]
        elif node.label == "control_stop" and not raw.get("mutation"):
            entry["mutation"] = {
                "tagName": "mutation",
                "children": [],
                "hasnext": "false",
            }
        self.out[block_id] = entry
        if node.label == "procedures_definition":
            self._write_procedure_definition(node, block_id, entry)
            return entry
        if node.label == "procedures_call":
            self._write_procedure_call(node, block_id, entry)
            return entry
        for child in node.children:
            self._write_child(child, block_id, entry)
        return entry

    def _write_child(self, child: Node, owner_id: str, entry: dict) -> None:
        label = child.label
        if label in (SUBSTACK_LABEL, ELSE_SUBSTACK_LABEL):
            slot = child.slot or (
                "SUBSTACK" if label == SUBSTACK_LABEL else "SUBSTACK2"
            )
            head = self.write_chain(child.children, parent_id=owner_id, top_level=False)
            if head is not None:
                entry["inputs"][slot] = [2, head]
            return
        if child.slot is None:
            raise UnserializableNode(f"node {label!r} has no slot in {entry['opcode']}")
        if label.startswith("field:"):
            self._write_field_leaf(child, entry)
            return
        if label.startswith("lit:"):
            if child.raw_prim is not None:
                entry["inputs"][child.slot] = child.raw_prim
            elif label == "lit:number":
                entry["inputs"][child.slot] = [1, [4, "0"]]
            else:
                entry["inputs"][child.slot] = [1, [10, ""]]
            return
        # expression block child
        if child.raw_prim is not None and child.label in (
            "data_variable",
            "data_listcontents",
        ):
            entry["inputs"][child.slot] = child.raw_prim
            return
        child_id = self.block_id(child)
        self.write_block(child, child_id)
        self.out[child_id]["parent"] = owner_id
        shadow = bool((child.raw or {}).get("shadow", False))
        entry["inputs"][child.slot] = [1 if shadow else 2, child_id]

    def _write_field_leaf(self, child: Node, entry: dict) -> None:
        name = child.label[len("field:") :]
        if child.slot_kind == "input":
            # broadcast input
            if child.raw_prim is not None:
                entry["inputs"][child.slot] = child.raw_prim
            else:
                entry["inputs"][child.slot] = [
                    1,
                    [11, name, self.resolver.broadcast_id(name)],
                ]
            return
        if child.raw_prim is not None:
            entry["fields"][child.slot] = child.raw_prim
            return
        if child.slot == "VARIABLE":
            entry["fields"][child.slot] = [name, self.resolver.variable_id(name)]
        elif child.slot == "LIST":
            entry["fields"][child.slot] = [name, self.resolver.list_id(name)]
        elif child.slot == "BROADCAST_OPTION":
            entry["fields"][child.slot] = [name, self.resolver.broadcast_id(name)]
        else:
            entry["fields"][child.slot] = [name, None]

    def _proc_fields(self, node: Node) -> tuple[str, list[str]]:
        proccode = ""
        args = []
        for child in node.children:
            if child.slot == _PROC_SLOT:
                proccode = child.label[len("field:") :]
            elif child.slot and child.slot.startswith(_ARG_SLOT):
                args.append(child.label[len("field:") :])
        return proccode, args

    def _write_procedure_definition(
        self, node: Node, block_id: str, entry: dict
    ) -> None:
        if node.raw_proto is not None:
            proto_id = node.raw_proto["id"]
            self.out[proto_id] = dict(node.raw_proto["block"], parent=block_id)
            for rep_id, rep in node.raw_proto["reporters"].items():
                self.out[rep_id] = dict(rep, parent=proto_id)
            entry["inputs"]["custom_block"] = [1, proto_id]
            return
        proccode, args = self._proc_fields(node)
        proto_id = self.fresh_id()
        arg_ids = []
        proto_inputs = {}
        for argname in args:
            rep_id = self.fresh_id()
            self.out[rep_id] = {
                "opcode": "argument_reporter_string_number",
                "next": None,
                "parent": proto_id,
                "inputs": {},
                "fields": {"VALUE": [argname, None]},
                "shadow": True,
                "topLevel": False,
            }
            arg_id = f"arg:{argname}"
            arg_ids.append(arg_id)
            proto_inputs[arg_id] = [1, rep_id]
        self.out[proto_id] = {
            "opcode": "procedures_prototype",
            "next": None,
            "parent": block_id,
            "inputs": proto_inputs,
            "fields": {},
            "shadow": True,
            "topLevel": False,
            "mutation": {
                "tagName": "mutation",
                "children": [],
                "proccode": proccode,
                "argumentids": json.dumps(arg_ids),
                "argumentnames": json.dumps(args),
                "argumentdefaults": json.dumps([""] * len(args)),
                "warp": "false",
            },
        }
        entry["inputs"]["custom_block"] = [1, proto_id]

    def _write_procedure_call(self, node: Node, block_id: str, entry: dict) -> None:
        raw = node.raw or {}
        arg_children = [c for c in node.children if c.slot != _PROC_SLOT]
        for child in arg_children:
            self._write_child(child, block_id, entry)
        if raw.get("mutation"):
            entry["mutation"] = raw["mutation"]
        else:
            proccode, _ = self._proc_fields(node)
            entry["mutation"] = {
                "tagName": "mutation",
                "children": [],
                "proccode": proccode,
                "argumentids": json.dumps([c.slot for c in arg_children]),
                "warp": "false",
            }


def _minimal_sprite(name: str, layer: int) -> dict:
    return {
        "isStage": False,
        "name": name,
        "variables": {},
        "lists": {},
        "broadcasts": {},
        "blocks": {},
        "comments": {},
        "currentCostume": 0,
        "costumes": [],
        "sounds": [],
        "volume": 100,
        "layerOrder": layer,
        "visible": True,
        "x": 0,
        "y": 0,
        "size": 100,
        "direction": 90,
        "draggable": False,
        "rotationStyle": "all around",
    }


def serialize_project(program: Program, template: ProjectFile | str | Path) -> bytes:
    """Serialize a (possibly hint-modified) Program back to project.json.

    The template is the file the program was parsed from; it supplies the
    non-block envelope (variables, costumes, meta, ...). Blocks are rebuilt
    from the AST: parsed nodes keep their original ids and concrete values,
    synthesized nodes get fresh ids and neutral literal placeholders.
    """
    if not isinstance(template, ProjectFile):
        template = ProjectFile.detect(template)
    doc = _load_document(template)
    old_targets = doc["targets"]
    resolver = _NameResolver(old_targets)

    new_targets = []
    max_layer = max(
        (t.get("layerOrder", 0) for t in old_targets if isinstance(t, dict)),
        default=0,
    )
    stage_json: dict | None = None
    for actor in program.actors:
        if actor.raw_index is not None and actor.raw_index < len(old_targets):
            target = json.loads(json.dumps(old_targets[actor.raw_index]))
            target["name"] = actor.name
        else:
            max_layer += 1
            target = _minimal_sprite(actor.name, max_layer)
        writer = _BlockWriter(resolver)
        target["blocks"] = writer.write_scripts(actor)
        if actor.is_stage:
            stage_json = target
        new_targets.append(target)
    if stage_json is not None:
        resolver.apply_to_stage(stage_json)
    doc["targets"] = new_targets
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def write_sb3(project_json: bytes, path: str | Path) -> None:
    """Wrap project.json bytes into a minimal .sb3 zip archive."""
    with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as zf:
        zf.writestr("project.json", project_json)


def load_tree_json(path: str | Path) -> Node:
    """Load a bare labeled tree from JSON ({"label": ..., "children": [...]}).

    Accepted by the profile/distance CLI commands alongside real projects,
    mainly for worked examples and debugging.
    """
    try:
        doc = json.loads(Path(path).read_bytes())
    except ValueError as exc:
        raise MalformedJson(f"{path}: {exc}")

    def build(obj: object) -> Node:
        if not isinstance(obj, dict) or "label" not in obj:
            raise NotAScratchProject(f"{path}: not a labeled tree")
        children = obj.get("children") or []
        return Node(
            _escape_label(str(obj["label"])), [build(c) for c in children]
        )

    return build(doc)


def looks_like_tree_json(path: str | Path) -> bool:
    """Cheap sniff: JSON object with a "label" key and no "targets" array."""
    try:
        with open(path, "rb") as fh:
            head = fh.read(4)
        if head == _ZIP_MAGIC:
            return False
        doc = json.loads(Path(path).read_bytes())
    except (OSError, ValueError):
        return False
    return isinstance(doc, dict) and "label" in doc and "targets" not in doc
