"""Hint synthesis from diff results, and hint application for evaluation.

Every deletion candidate becomes one delete hint and every addition candidate
one add / new-script / new-actor hint; no ranking or selection happens here,
presentation is the caller's concern. A hint carries the node plus enough
context to locate it: parent label, up to q-1 sibling labels to each side,
the actor and script, and the child position.

Application replaces a student round: deletions splice the referenced nodes
out of their chains, additions copy the target node one level deep (label
plus leaf children, literal values neutralized), new-script hints add a
hat-only script, new-actor hints an empty actor. Add hints land in the
matched source script at the hinted position, clamped to the chain length.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

from .diffing import ADD, DELETE, NEW_ACTOR, NEW_SCRIPT, DiffResult, NodeRef
from .errors import StaleHint
from .matching import MatchPlan
from .model import (
    SCRIPT_LABEL,
    SUBSTACK_LABEL,
    ELSE_SUBSTACK_LABEL,
    Actor,
    Node,
    Program,
    Script,
    is_hat_opcode,
)
from .pqgram import PqParams

_CONTAINER_PARENTS = {SUBSTACK_LABEL, ELSE_SUBSTACK_LABEL}


@dataclass
class Hint:
    kind: str  # add | delete | new-script | new-actor
    node_label: str
    parent_label: str
    left_siblings: list[str]
    right_siblings: list[str]
    actor: str
    script_index: int
    position: int
    provenance: str
    # resolution refs: delete -> node in the source, others -> node in the target
    source_node: int | None = None
    target_actor: str | None = None
    target_script: int | None = None
    target_node: int | None = None

    def to_json(self) -> dict:
        doc = {
            "kind": self.kind,
            "node": self.node_label,
            "parent": self.parent_label,
            "left": list(self.left_siblings),
            "right": list(self.right_siblings),
            "actor": self.actor,
            "script": self.script_index,
            "position": self.position,
            "from": self.provenance,
        }
        ref: dict = {}
        if self.source_node is not None:
            ref["node"] = self.source_node
        if self.target_actor is not None:
            ref["target_actor"] = self.target_actor
            ref["target_script"] = self.target_script
            ref["target_node"] = self.target_node
        doc["ref"] = ref
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "Hint":
        ref = doc.get("ref") or {}
        return cls(
            kind=doc["kind"],
            node_label=doc["node"],
            parent_label=doc["parent"],
            left_siblings=list(doc.get("left") or []),
            right_siblings=list(doc.get("right") or []),
            actor=doc["actor"],
            script_index=doc["script"],
            position=doc["position"],
            provenance=doc.get("from", ""),
            source_node=ref.get("node"),
            target_actor=ref.get("target_actor"),
            target_script=ref.get("target_script"),
            target_node=ref.get("target_node"),
        )


@dataclass
class HintSet:
    hints: list[Hint]
    source_id: str
    target_id: str
    params: PqParams
    threshold: float | None = None

    def to_json(self) -> dict:
        return {
            "source_id": self.source_id,
            "target_id": self.target_id,
            "p": self.params.p,
            "q": self.params.q,
            "threshold": self.threshold,
            "hints": [h.to_json() for h in self.hints],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "HintSet":
        return cls(
            hints=[Hint.from_json(h) for h in doc.get("hints", [])],
            source_id=doc.get("source_id", ""),
            target_id=doc.get("target_id", ""),
            params=PqParams(doc.get("p", 2), doc.get("q", 3)),
            threshold=doc.get("threshold"),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False)

    @classmethod
    def loads(cls, text: str) -> "HintSet":
        return cls.from_json(json.loads(text))


def _parent_map(script: Script) -> dict[int, tuple[Node, int]]:
    """id(node) -> (parent node, index among parent's children)."""
    out: dict[int, tuple[Node, int]] = {}
    stack = [script.root]
    while stack:
        node = stack.pop()
        for i, child in enumerate(node.children):
            out[id(child)] = (node, i)
            stack.append(child)
    return out


def _find_node(script: Script, node_id: int, label: str) -> Node | None:
    for node in script.root.walk():
        if node.node_id == node_id:
            return node if node.label == label else None
    return None


def _context(
    script: Script, node: Node, parents: dict[int, tuple[Node, int]], q: int
) -> tuple[str, list[str], list[str], int]:
    parent, position = parents[id(node)]
    parent_label = parent.label
    if parent_label in _CONTAINER_PARENTS and id(parent) in parents:
        # report the enclosing block (e.g. the loop) rather than the
        # substack container, which is an encoding artifact
        parent_label = parents[id(parent)][0].label
    siblings = parent.children
    left = [s.label for s in siblings[max(0, position - (q - 1)) : position]]
    right = [s.label for s in siblings[position + 1 : position + q]]
    return parent_label, left, right, position


def _leaf_copy(node: Node) -> Node:
    """One-level copy: label plus leaf children, literals as placeholders."""
    children = [
        Node(c.label, slot=c.slot, slot_kind=c.slot_kind)
        for c in node.children
        if c.label.startswith("field:") or c.label.startswith("lit:")
    ]
    return Node(node.label, children)


def synthesize(
    source: Program,
    target: Program,
    diff: DiffResult,
    params: PqParams = PqParams(),
    threshold: float | None = None,
) -> HintSet:
    """Dress every diff candidate with its context; one hint per candidate."""
    if diff.plan is None:
        raise ValueError("diff result carries no match plan")
    plan: MatchPlan = diff.plan
    q = params.q

    src_actor_rank = {a.name: i for i, a in enumerate(source.actors)}
    new_actor_rank = {
        name: len(source.actors) + i
        for i, name in enumerate(plan.unmatched_target_actors)
    }
    # map target (actor, script) back to the source script it was matched to
    to_source: dict[tuple[str, int], tuple[str, int]] = {}
    for match in plan.actor_matches:
        if match.target_actor is None:
            continue
        for sm in plan.script_matches.get(match.source_actor, []):
            if sm.source_script is not None and sm.target_script is not None:
                to_source[(match.target_actor, sm.target_script)] = (
                    match.source_actor,
                    sm.source_script,
                )

    src_parents = {
        (a.name, s.script_index): _parent_map(s)
        for a in source.actors
        for s in a.scripts
    }
    tgt_parents = {
        (a.name, s.script_index): _parent_map(s)
        for a in target.actors
        for s in a.scripts
    }

    hints: list[Hint] = []
    # (actor rank, script order, kind order, node order) for deterministic output
    sort_keys: dict[int, tuple] = {}
    new_script_seq: dict[str, int] = {}

    def record(hint: Hint, key: tuple) -> None:
        sort_keys[id(hint)] = key
        hints.append(hint)

    for ref in diff.deletions:
        actor = source.actor(ref.actor)
        script = actor.scripts[ref.script_index]
        node = _find_node(script, ref.node_id, ref.label)
        parent_label, left, right, position = _context(
            script, node, src_parents[(ref.actor, ref.script_index)], q
        )
        hint = Hint(
            kind=DELETE,
            node_label=ref.label,
            parent_label=parent_label,
            left_siblings=left,
            right_siblings=right,
            actor=ref.actor,
            script_index=ref.script_index,
            position=position,
            provenance=target.source_id,
            source_node=ref.node_id,
        )
        record(hint, (src_actor_rank[ref.actor], ref.script_index, 0, ref.node_id))

    for ref in diff.additions:
        if ref.kind == NEW_ACTOR:
            rank = new_actor_rank[ref.actor]
            position = next(
                i for i, a in enumerate(target.actors) if a.name == ref.actor
            )
            hint = Hint(
                kind=NEW_ACTOR,
                node_label=ref.label,
                parent_label="program",
                left_siblings=[],
                right_siblings=[],
                actor=ref.actor,
                script_index=-1,
                position=position,
                provenance=target.source_id,
                target_actor=ref.actor,
                target_script=-1,
                target_node=-1,
            )
            record(hint, (rank, -1, 0, 0))
            continue

        tgt_actor = target.actor(ref.actor)
        script = tgt_actor.scripts[ref.script_index]
        node = _find_node(script, ref.node_id, ref.label)

        if ref.kind == NEW_SCRIPT:
            if ref.actor in new_actor_rank:
                hint_actor, rank = ref.actor, new_actor_rank[ref.actor]
                script_index = ref.script_index
            else:
                # matched actor pair: the new script belongs to the source
                # actor that actor-matched this target actor
                hint_actor = next(
                    m.source_actor
                    for m in plan.actor_matches
                    if m.target_actor == ref.actor
                )
                rank = src_actor_rank[hint_actor]
                seq = new_script_seq.get(hint_actor, 0)
                new_script_seq[hint_actor] = seq + 1
                script_index = len(source.actor(hint_actor).scripts) + seq
            hint = Hint(
                kind=NEW_SCRIPT,
                node_label=ref.label,
                parent_label="actor",
                left_siblings=[],
                right_siblings=[],
                actor=hint_actor,
                script_index=script_index,
                position=ref.script_index,
                provenance=target.source_id,
                target_actor=ref.actor,
                target_script=ref.script_index,
                target_node=ref.node_id,
            )
            record(hint, (rank, script_index, 2, ref.node_id))
            continue

        src_actor_name, src_script_index = to_source[(ref.actor, ref.script_index)]
        parent_label, left, right, position = _context(
            script, node, tgt_parents[(ref.actor, ref.script_index)], q
        )
        hint = Hint(
            kind=ADD,
            node_label=ref.label,
            parent_label=parent_label,
            left_siblings=left,
            right_siblings=right,
            actor=src_actor_name,
            script_index=src_script_index,
            position=position,
            provenance=target.source_id,
            target_actor=ref.actor,
            target_script=ref.script_index,
            target_node=ref.node_id,
        )
        record(
            hint, (src_actor_rank[src_actor_name], src_script_index, 1, ref.node_id)
        )

    hints.sort(key=lambda h: sort_keys[id(h)])
    return HintSet(
        hints=hints,
        source_id=source.source_id,
        target_id=target.source_id,
        params=params,
        threshold=threshold,
    )


def _resolve_target_node(target: Program, hint: Hint) -> Node:
    actor = target.actor(hint.target_actor or "")
    if actor is None or not 0 <= (hint.target_script or 0) < len(actor.scripts):
        raise StaleHint(f"hint references unknown target script: {hint.to_json()}")
    node = _find_node(
        actor.scripts[hint.target_script], hint.target_node, hint.node_label
    )
    if node is None:
        raise StaleHint(f"hint does not resolve in target: {hint.to_json()}")
    return node


def apply_hints(source: Program, hints: HintSet, target: Program) -> Program:
    """Apply every hint to a copy of the source program.

    Deletions are resolved to concrete nodes before any mutation, so
    application order cannot invalidate references; a reference that fails to
    resolve signals a stale hint file. The result satisfies the program
    invariants (indices renumbered, empty scripts dropped) and serializes.
    """
    result = copy.deepcopy(source)

    deletions: list[tuple[Node, Node]] = []  # (parent, node)
    for hint in hints.hints:
        if hint.kind != DELETE:
            continue
        actor = result.actor(hint.actor)
        if actor is None or not 0 <= hint.script_index < len(actor.scripts):
            raise StaleHint(f"hint references unknown script: {hint.to_json()}")
        script = actor.scripts[hint.script_index]
        node = _find_node(script, hint.source_node, hint.node_label)
        if node is None:
            raise StaleHint(f"hint does not resolve in source: {hint.to_json()}")
        parent, _ = _parent_map(script)[id(node)]
        deletions.append((parent, node))

    for parent, node in deletions:
        parent.children = [c for c in parent.children if c is not node]

    for hint in hints.hints:
        if hint.kind == NEW_ACTOR:
            if result.actor(hint.actor) is None:
                result.actors.append(Actor(name=hint.actor, is_stage=False))
        elif hint.kind == NEW_SCRIPT:
            actor = result.actor(hint.actor)
            if actor is None:
                raise StaleHint(f"new-script hint for unknown actor {hint.actor!r}")
            head = _leaf_copy(_resolve_target_node(target, hint))
            actor.scripts.append(
                Script(Node(SCRIPT_LABEL, [head]), has_hat=False, script_index=0)
            )

    add_hints = sorted(
        (h for h in hints.hints if h.kind == ADD),
        key=lambda h: (h.actor, h.script_index, h.position, h.target_node or 0),
    )
    for hint in add_hints:
        actor = result.actor(hint.actor)
        if actor is None or not 0 <= hint.script_index < len(actor.scripts):
            raise StaleHint(f"hint references unknown script: {hint.to_json()}")
        script = actor.scripts[hint.script_index]
        node = _leaf_copy(_resolve_target_node(target, hint))
        chain = script.root.children
        floor = 1 if chain and is_hat_opcode(chain[0].label) else 0
        position = min(max(hint.position, floor), len(chain))
        chain.insert(position, node)

    for actor in result.actors:
        actor.scripts = [s for s in actor.scripts if s.root.children]
        for i, script in enumerate(actor.scripts):
            script.refresh(i)
    return result
