"""Corpus evaluation: leave-one-out hint generation, apply-all, metrics.

For every project in the pool, hints are generated once against the remaining
projects, all of them are applied, and size/quality metrics are compared
before and after. Re-running the external test suite on the written outputs
is the caller's job; a second report file supplies the after-hints pass
counts when available.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import NoCandidates, ZeroVariance
from .hints import apply_hints
from .model import Program, is_block_label
from .pipeline import hints_for_source
from .pool import PoolEntry, Threshold, load_pool, load_reports
from .pqgram import PqParams
from .sb3 import serialize_project
from .stats import mann_whitney_u, pearson_r, vargha_delaney_a12

A12_ORIENTATION = (
    "a12 is computed over (before, after) samples; values below 0.5 mean the "
    "before sample tends to be smaller"
)


@dataclass
class Metrics:
    block_count: int
    dead_code_scripts: int
    empty_scripts: int

    def to_json(self) -> dict:
        return {
            "block_count": self.block_count,
            "dead_code_scripts": self.dead_code_scripts,
            "empty_scripts": self.empty_scripts,
        }


def compute_metrics(program: Program) -> Metrics:
    """Block count, dead-code scripts (no hat), hat-only empty scripts.

    Event handlers are not statements and do not count as blocks, so a
    hat-only script has block_count 0 (and empty_scripts 1).
    """
    blocks = 0
    dead = 0
    empty = 0
    for actor in program.actors:
        for script in actor.scripts:
            blocks += sum(
                1
                for n in script.root.walk()
                if is_block_label(n.label) and not is_hat_opcode(n.label)
            )
            if not script.has_hat:
                dead += 1
            elif len(script.root.children) == 1:
                empty += 1
    return Metrics(block_count=blocks, dead_code_scripts=dead, empty_scripts=empty)


@dataclass
class EvalSummary:
    per_project: list[dict]
    aggregates: dict

    def to_json(self) -> dict:
        return {"per_project": self.per_project, "aggregates": self.aggregates}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _mean(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def _paired_stats(before: list[float], after: list[float]) -> dict | None:
    if not before or not after:
        return None
    u, p = mann_whitney_u(before, after)
    return {"u": u, "p": p, "a12": vargha_delaney_a12(before, after)}


def evaluate_corpus(
    pool_dir: str | Path,
    reports_path: str | Path,
    threshold: Threshold = Threshold(),
    params: PqParams = PqParams(),
    out_dir: str | Path | None = None,
    after_reports_path: str | Path | None = None,
    seed: int | None = None,
) -> EvalSummary:
    """Leave-one-out evaluation over a pool directory.

    Writes ``out/<id>.json`` (hint-applied programs), ``hints/<id>.hints.json``
    and ``summary.json`` under out_dir when given. Projects with no qualifying
    candidate are recorded, not fatal.
    """
    reports = load_reports(reports_path)
    entries = load_pool(pool_dir, reports)
    if len(entries) < 2:
        raise ValueError("corpus evaluation needs at least 2 projects")
    after_by_id = {}
    if after_reports_path is not None:
        after_by_id = {r.project_id: r for r in load_reports(after_reports_path)}

    out_path = Path(out_dir) if out_dir is not None else None
    if out_path is not None:
        (out_path / "out").mkdir(parents=True, exist_ok=True)
        (out_path / "hints").mkdir(parents=True, exist_ok=True)

    per_project = []
    for entry in sorted(entries, key=lambda e: e.project_id):
        row = _evaluate_one(entry, entries, threshold, params, seed, out_path)
        after_report = after_by_id.get(entry.project_id)
        row["tests_passed_after"] = after_report.passed if after_report else None
        per_project.append(row)

    aggregates = _aggregate(per_project)
    summary = EvalSummary(per_project=per_project, aggregates=aggregates)
    if out_path is not None:
        (out_path / "summary.json").write_text(summary.dumps())
    return summary


def _evaluate_one(
    entry: PoolEntry,
    entries: list[PoolEntry],
    threshold: Threshold,
    params: PqParams,
    seed: int | None,
    out_path: Path | None,
) -> dict:
    before = compute_metrics(entry.program)
    row = {
        "project_id": entry.project_id,
        "tests_passed_before": entry.report.passed,
        "tests_total": entry.report.counted,
        "metrics_before": before.to_json(),
        "metrics_after": None,
        "hint_count": None,
        "target_id": None,
        "distance": None,
        "error": None,
    }
    try:
        run = hints_for_source(entry.program, entries, threshold, params, seed)
    except NoCandidates:
        row["error"] = "no-candidates"
        return row
    patched = apply_hints(entry.program, run.hints, run.selection.target.program)
    row["metrics_after"] = compute_metrics(patched).to_json()
    row["hint_count"] = len(run.hints.hints)
    row["target_id"] = run.selection.target.project_id
    row["distance"] = run.selection.distance
    if out_path is not None:
        hints_file = out_path / "hints" / f"{entry.project_id}.hints.json"
        hints_file.write_text(run.hints.dumps())
        if entry.path is not None:
            data = serialize_project(patched, entry.path)
            (out_path / "out" / f"{entry.project_id}.json").write_bytes(data)
    return row


def _aggregate(per_project: list[dict]) -> dict:
    applied = [r for r in per_project if r["metrics_after"] is not None]
    aggregates: dict = {
        "projects": len(per_project),
        "projects_with_hints": len(applied),
        "a12_orientation": A12_ORIENTATION,
    }
    for key in ("block_count", "dead_code_scripts", "empty_scripts"):
        before = [float(r["metrics_before"][key]) for r in per_project]
        after = [float(r["metrics_after"][key]) for r in applied]
        aggregates[f"mean_{key}_before"] = _mean(before)
        aggregates[f"mean_{key}_after"] = _mean(after)
        aggregates[key] = _paired_stats(
            [float(r["metrics_before"][key]) for r in applied], after
        )

    tested = [r for r in per_project if r["tests_passed_after"] is not None]
    aggregates["mean_tests_passed_before"] = _mean(
        [float(r["tests_passed_before"]) for r in per_project]
    )
    if tested:
        before = [float(r["tests_passed_before"]) for r in tested]
        after = [float(r["tests_passed_after"]) for r in tested]
        aggregates["mean_tests_passed_after"] = _mean(after)
        aggregates["tests_passed"] = _paired_stats(before, after)
    else:
        aggregates["mean_tests_passed_after"] = None
        aggregates["tests_passed"] = None

    sized = [r for r in applied if r["hint_count"] is not None]
    blocks = [float(r["metrics_before"]["block_count"]) for r in sized]
    hint_counts = [float(r["hint_count"]) for r in sized]
    try:
        r_value, p_value = pearson_r(blocks, hint_counts)
        aggregates["blocks_vs_hints_pearson"] = {"r": r_value, "p": p_value}
    except (ValueError, ZeroVariance):
        aggregates["blocks_vs_hints_pearson"] = None
    return aggregates
