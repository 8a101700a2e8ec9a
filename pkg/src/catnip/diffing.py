"""Addition/deletion candidates from a match plan.

Node identity for the script diff is a one-level fingerprint: the node's
label plus the ordered labels of its direct children. Fingerprint bags are
built over opcode-labeled nodes only; ``field:``/``lit:`` leaves and the
container nodes never diff on their own, they only shape their parent's
fingerprint. Source occurrences beyond the shared bag count become deletion
candidates, target occurrences beyond it addition candidates, excess picked
leftmost in preorder.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .matching import MatchPlan
from .model import ACTOR_LABEL, Node, Program, Script, block_nodes

ADD = "add"
DELETE = "delete"
NEW_SCRIPT = "new-script"
NEW_ACTOR = "new-actor"


@dataclass(frozen=True)
class NodeRef:
    """Pointer to one node of a program; additions point into the target."""

    actor: str
    script_index: int
    node_id: int
    label: str
    kind: str = ADD  # add | delete | new-script | new-actor


@dataclass
class DiffResult:
    deletions: list[NodeRef] = field(default_factory=list)
    additions: list[NodeRef] = field(default_factory=list)
    plan: MatchPlan | None = None


def fingerprint(node: Node) -> tuple[str, tuple[str, ...]]:
    return node.label, tuple(child.label for child in node.children)


def fingerprint_bag(script: Script) -> Counter:
    return Counter(fingerprint(n) for n in block_nodes(script))


def _excess_nodes(script: Script, surplus: Counter) -> list[Node]:
    """Pick, leftmost in preorder, one node per surplus fingerprint count."""
    budget = Counter(surplus)
    picked = []
    for node in block_nodes(script):
        fp = fingerprint(node)
        if budget[fp] > 0:
            budget[fp] -= 1
            picked.append(node)
    return picked


def diff_scripts(
    src_script: Script, tgt_script: Script
) -> tuple[list[Node], list[Node]]:
    """Deletion and addition candidate nodes for one matched script pair."""
    src_bag = fingerprint_bag(src_script)
    tgt_bag = fingerprint_bag(tgt_script)
    shared = Counter(
        {fp: min(count, tgt_bag[fp]) for fp, count in src_bag.items() if fp in tgt_bag}
    )
    deletions = _excess_nodes(src_script, src_bag - shared)
    additions = _excess_nodes(tgt_script, tgt_bag - shared)
    return deletions, additions


def _script_head(script: Script) -> Node | None:
    """The script's event handler: its first block (hat when one exists)."""
    return script.root.children[0] if script.root.children else None


def diff_programs(source: Program, target: Program, plan: MatchPlan) -> DiffResult:
    """Union of script diffs plus whole-script and whole-actor leftovers.

    Unmatched source scripts contribute all their blocks as deletions;
    unmatched target scripts contribute just their event handler as a
    new-script addition; unmatched target actors contribute an actor-creation
    addition plus one new-script addition per script.
    """
    result = DiffResult(plan=plan)
    target_actors = {a.name: a for a in target.actors}

    for match in plan.actor_matches:
        src_actor = source.actor(match.source_actor)
        if match.target_actor is None:
            for script in src_actor.scripts:
                result.deletions.extend(
                    NodeRef(src_actor.name, script.script_index, n.node_id, n.label, DELETE)
                    for n in block_nodes(script)
                )
            continue
        tgt_actor = target_actors[match.target_actor]
        for sm in plan.script_matches.get(match.source_actor, []):
            if sm.source_script is not None and sm.target_script is not None:
                deletions, additions = diff_scripts(
                    src_actor.scripts[sm.source_script],
                    tgt_actor.scripts[sm.target_script],
                )
                result.deletions.extend(
                    NodeRef(src_actor.name, sm.source_script, n.node_id, n.label, DELETE)
                    for n in deletions
                )
                result.additions.extend(
                    NodeRef(tgt_actor.name, sm.target_script, n.node_id, n.label, ADD)
                    for n in additions
                )
            elif sm.source_script is not None:
                script = src_actor.scripts[sm.source_script]
                result.deletions.extend(
                    NodeRef(src_actor.name, sm.source_script, n.node_id, n.label, DELETE)
                    for n in block_nodes(script)
                )
            else:
                script = tgt_actor.scripts[sm.target_script]
                head = _script_head(script)
                if head is not None:
                    result.additions.append(
                        NodeRef(
                            tgt_actor.name,
                            sm.target_script,
                            head.node_id,
                            head.label,
                            NEW_SCRIPT,
                        )
                    )

    for name in plan.unmatched_target_actors:
        actor = target_actors[name]
        result.additions.append(NodeRef(name, -1, -1, ACTOR_LABEL, NEW_ACTOR))
        for script in actor.scripts:
            head = _script_head(script)
            if head is not None:
                result.additions.append(
                    NodeRef(
                        name, script.script_index, head.node_id, head.label, NEW_SCRIPT
                    )
                )
    return result
