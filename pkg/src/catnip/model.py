"""Normalized labeled AST for Scratch projects.

A parsed project is a ``Program`` holding ``Actor``s (stage first), each
holding ``Script``s, each a tree of ``Node``s. Labels follow one alphabet:

* block nodes carry their sb3 opcode (``control_stop``, ``data_setvariableto``)
* dropdown/variable/list/broadcast values are ``field:<value>`` leaves
* literal inputs are ``lit:number`` / ``lit:string`` leaves (values abstracted)
* container nodes use the fixed labels ``program``, ``actor``, ``script``,
  ``substack`` and ``else-substack``

Statement chains (sb3 ``next`` links) appear as consecutive children of
their container node, so splicing a statement out of a chain is a plain
child-list removal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

PROGRAM_LABEL = "program"
ACTOR_LABEL = "actor"
SCRIPT_LABEL = "script"
SUBSTACK_LABEL = "substack"
ELSE_SUBSTACK_LABEL = "else-substack"

CONTAINER_LABELS = frozenset(
    {PROGRAM_LABEL, ACTOR_LABEL, SCRIPT_LABEL, SUBSTACK_LABEL, ELSE_SUBSTACK_LABEL}
)

# Hat blocks that can start a script. Anything matching event_when* plus the
# clone-start and custom-block-definition hats.
_EXTRA_HAT_OPCODES = frozenset(
    {
        "control_start_as_clone",
        "procedures_definition",
        "videoSensing_whenMotionGreaterThan",
        "makeymakey_whenMakeyKeyPressed",
        "makeymakey_whenCodePressed",
    }
)


def is_hat_opcode(label: str) -> bool:
    return label.startswith("event_when") or label in _EXTRA_HAT_OPCODES


def is_block_label(label: str) -> bool:
    """True for opcode-labeled nodes (statements and expressions)."""
    return (
        label not in CONTAINER_LABELS
        and not label.startswith("field:")
        and not label.startswith("lit:")
    )


@dataclass(eq=False)
class Node:
    """One AST node (identity equality; see nodes_equal for structure).

    ``slot`` records which sb3 input/field key the node fills in its parent
    block; ``raw_ref``/``raw``/``raw_prim`` keep the original sb3 material of
    parsed nodes so serialization can reproduce concrete values. Synthesized
    nodes (added by hints) leave them unset.
    """

    label: str
    children: list[Node] = field(default_factory=list)
    node_id: int | None = None
    raw_ref: str | None = None
    slot: str | None = field(default=None, repr=False)
    slot_kind: str | None = field(default=None, repr=False)  # "input" | "field"
    raw: dict | None = field(default=None, repr=False)
    raw_prim: list | None = field(default=None, repr=False)
    raw_proto: dict | None = field(default=None, repr=False)

    def walk(self) -> Iterator[Node]:
        """Preorder traversal of this subtree."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


@dataclass
class Script:
    """One connected component of blocks, wrapped in a ``script`` container.

    ``root`` is the container node; its children are the top-level chain.
    ``has_hat`` is False for loose blocks (dead-code candidates).
    """

    root: Node
    has_hat: bool
    script_index: int

    def renumber(self) -> None:
        """Assign preorder-consecutive node_ids starting at 0."""
        for i, node in enumerate(self.root.walk()):
            node.node_id = i

    def refresh(self, index: int) -> None:
        self.script_index = index
        self.has_hat = bool(self.root.children) and is_hat_opcode(
            self.root.children[0].label
        )
        self.renumber()


@dataclass
class Actor:
    name: str
    is_stage: bool
    scripts: list[Script] = field(default_factory=list)
    raw_index: int | None = field(default=None, repr=False)


@dataclass
class Program:
    actors: list[Actor]
    source_id: str

    @property
    def stage(self) -> Actor:
        return next(a for a in self.actors if a.is_stage)

    def actor(self, name: str) -> Actor | None:
        for a in self.actors:
            if a.name == name:
                return a
        return None


def iter_nodes(program: Program) -> Iterator[tuple[Actor, Script, Node]]:
    """Deterministic preorder over every script node of every actor."""
    for actor in program.actors:
        for script in actor.scripts:
            for node in script.root.walk():
                yield actor, script, node


def actor_tree(actor: Actor) -> Node:
    """Actor subtree used for pq-gram matching: ``actor`` over script roots."""
    return Node(ACTOR_LABEL, [s.root for s in actor.scripts])


def program_tree(program: Program) -> Node:
    """Whole-program tree: ``program`` over actor subtrees."""
    return Node(PROGRAM_LABEL, [actor_tree(a) for a in program.actors])


def block_nodes(script: Script) -> list[Node]:
    """Preorder list of the opcode-labeled nodes of a script."""
    return [n for n in script.root.walk() if is_block_label(n.label)]


def nodes_equal(a: Node, b: Node) -> bool:
    """Structural equality on labels and topology (raw refs ignored)."""
    if a.label != b.label or len(a.children) != len(b.children):
        return False
    return all(nodes_equal(x, y) for x, y in zip(a.children, b.children))


def programs_equal(a: Program, b: Program) -> bool:
    """Program structural equality: actor names, stage flags, script trees."""
    if len(a.actors) != len(b.actors):
        return False
    for aa, bb in zip(a.actors, b.actors):
        if aa.name != bb.name or aa.is_stage != bb.is_stage:
            return False
        if len(aa.scripts) != len(bb.scripts):
            return False
        if not all(
            nodes_equal(s.root, t.root) for s, t in zip(aa.scripts, bb.scripts)
        ):
            return False
    return True
