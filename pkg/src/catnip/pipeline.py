"""End-to-end hint generation: filter pool, select target, match, diff, dress."""

from __future__ import annotations

from dataclasses import dataclass

from .diffing import diff_programs
from .hints import HintSet, synthesize
from .matching import MatchPlan, build_match_plan
from .model import Program
from .pool import PoolEntry, TargetSelection, Threshold, filter_candidates, select_target
from .pqgram import PqParams


@dataclass
class HintRun:
    hints: HintSet
    selection: TargetSelection
    plan: MatchPlan

    def to_json(self, explain: bool = False) -> dict:
        doc = self.hints.to_json()
        if explain:
            doc["selection"] = {
                "target": self.selection.target.project_id,
                "distance": self.selection.distance,
                "ranked": [[pid, d] for pid, d in self.selection.ranked],
            }
            doc["match_plan"] = self.plan.to_json()
        return doc


def hints_for_source(
    source: Program,
    entries: list[PoolEntry],
    threshold: Threshold = Threshold(),
    params: PqParams = PqParams(),
    seed: int | None = None,
) -> HintRun:
    """Run the full pipeline for one source program against a pool.

    The source itself (same project id) never serves as its own candidate.
    Raises NoCandidates when the threshold filters out the whole pool.
    """
    pool = [e for e in entries if e.project_id != source.source_id]
    candidates = filter_candidates(pool, threshold)
    selection = select_target(source, candidates, params, seed)
    target = selection.target.program
    plan = build_match_plan(source, target, params, seed)
    diff = diff_programs(source, target, plan)
    hints = synthesize(source, target, diff, params, threshold.min_pass_fraction)
    return HintRun(hints=hints, selection=selection, plan=plan)
