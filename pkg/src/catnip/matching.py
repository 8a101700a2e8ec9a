"""Greedy actor and script matching between a source and a target program.

Actors pair by identical name first; the rest pair greedily by pq-gram
distance of their subtrees, each target actor consumed at most once. Scripts
of a matched actor pair are matched greedily from the smaller side, closest
unconsumed script first. Unmatched leftovers stay in the plan one-sided so
the differ can turn them into whole-script deletions or additions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from .model import Actor, Program, actor_tree
from .pqgram import PqParams, distance, profile


class MatchKind(Enum):
    EXACT_NAME = "exact-name"
    DISTANCE = "distance"
    UNMATCHED = "unmatched"


@dataclass
class ActorMatch:
    source_actor: str
    target_actor: str | None
    match_kind: MatchKind


@dataclass
class ScriptMatch:
    source_script: int | None
    target_script: int | None
    distance: float | None


@dataclass
class MatchPlan:
    actor_matches: list[ActorMatch]
    script_matches: dict[str, list[ScriptMatch]]  # keyed by source actor name
    unmatched_target_actors: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "actors": [
                {
                    "source": m.source_actor,
                    "target": m.target_actor,
                    "kind": m.match_kind.value,
                }
                for m in self.actor_matches
            ],
            "scripts": {
                name: [
                    {
                        "source": s.source_script,
                        "target": s.target_script,
                        "distance": s.distance,
                    }
                    for s in matches
                ]
                for name, matches in self.script_matches.items()
            },
            "unmatched_target_actors": list(self.unmatched_target_actors),
        }


def match_actors(
    source: Program,
    target: Program,
    params: PqParams = PqParams(),
    seed: int | None = None,
) -> list[ActorMatch]:
    """Two-phase actor matching: exact names, then nearest remaining subtree.

    Distance ties are broken by smallest target declaration index, or
    uniformly at random when a seed is given.
    """
    matches: list[ActorMatch] = []
    taken: set[str] = set()
    target_order = {a.name: i for i, a in enumerate(target.actors)}
    target_by_name = {a.name: a for a in target.actors}

    remaining: list[Actor] = []
    for actor in source.actors:
        if actor.name in target_by_name and actor.name not in taken:
            taken.add(actor.name)
            matches.append(ActorMatch(actor.name, actor.name, MatchKind.EXACT_NAME))
        else:
            remaining.append(actor)

    rng = random.Random(seed) if seed is not None else None
    profiles = {
        a.name: profile(actor_tree(a), params)
        for a in target.actors
        if a.name not in taken
    }
    for actor in remaining:
        free = [a for a in target.actors if a.name not in taken]
        if not free:
            matches.append(ActorMatch(actor.name, None, MatchKind.UNMATCHED))
            continue
        src_profile = profile(actor_tree(actor), params)
        scored = [(distance(src_profile, profiles[a.name]), a.name) for a in free]
        best = min(d for d, _ in scored)
        tied = [name for d, name in scored if d == best]
        if rng is not None:
            chosen = rng.choice(tied)
        else:
            chosen = min(tied, key=lambda name: target_order[name])
        taken.add(chosen)
        matches.append(ActorMatch(actor.name, chosen, MatchKind.DISTANCE))

    order = {a.name: i for i, a in enumerate(source.actors)}
    matches.sort(key=lambda m: order[m.source_actor])
    return matches


def match_scripts(
    source_actor: Actor, target_actor: Actor, params: PqParams = PqParams()
) -> list[ScriptMatch]:
    """Greedy script pairing, iterating the side with fewer scripts.

    Each iterated script takes the closest unconsumed script of the other
    side (ties to the smallest index); leftovers become one-sided matches.
    """
    src_profiles = [profile(s.root, params) for s in source_actor.scripts]
    tgt_profiles = [profile(s.root, params) for s in target_actor.scripts]
    iterate_target = len(source_actor.scripts) > len(target_actor.scripts)

    pairs: list[tuple[int, int, float]] = []
    if iterate_target:
        free = set(range(len(src_profiles)))
        for j, tp in enumerate(tgt_profiles):
            if not free:
                break
            i = min(free, key=lambda i: (distance(src_profiles[i], tp), i))
            free.discard(i)
            pairs.append((i, j, distance(src_profiles[i], tp)))
    else:
        free = set(range(len(tgt_profiles)))
        for i, sp in enumerate(src_profiles):
            if not free:
                break
            j = min(free, key=lambda j: (distance(sp, tgt_profiles[j]), j))
            free.discard(j)
            pairs.append((i, j, distance(sp, tgt_profiles[j])))

    matches = [ScriptMatch(i, j, d) for i, j, d in sorted(pairs)]
    paired_src = {i for i, _, _ in pairs}
    paired_tgt = {j for _, j, _ in pairs}
    for i in range(len(src_profiles)):
        if i not in paired_src:
            matches.append(ScriptMatch(i, None, None))
    for j in range(len(tgt_profiles)):
        if j not in paired_tgt:
            matches.append(ScriptMatch(None, j, None))
    return matches


def build_match_plan(
    source: Program,
    target: Program,
    params: PqParams = PqParams(),
    seed: int | None = None,
) -> MatchPlan:
    actor_matches = match_actors(source, target, params, seed)
    script_matches: dict[str, list[ScriptMatch]] = {}
    for match in actor_matches:
        if match.target_actor is None:
            continue
        src = source.actor(match.source_actor)
        tgt = target.actor(match.target_actor)
        script_matches[match.source_actor] = match_scripts(src, tgt, params)
    matched_targets = {
        m.target_actor for m in actor_matches if m.target_actor is not None
    }
    unmatched_targets = [
        a.name for a in target.actors if a.name not in matched_targets
    ]
    return MatchPlan(
        actor_matches=actor_matches,
        script_matches=script_matches,
        unmatched_target_actors=unmatched_targets,
    )
