"""Candidate pools: test-report ingestion, threshold filtering, target choice.

Test outcomes come from an external runner as JSON; nothing here executes
Scratch code. A solution qualifies as hint candidate when its pass fraction
meets the threshold (default 90%), and the qualifying program nearest to the
source by pq-gram distance becomes the hint target.
"""

from __future__ import annotations

import json
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence, TypeVar

from .errors import DuplicateProjectId, EmptyReport, NoCandidates, SchemaError
from .model import Program
from .pqgram import PqGramProfile, PqParams, distance, program_profile
from .sb3 import parse_project

_OUTCOMES = ("pass", "fail", "error", "skip")

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    """Worker cap from CATNIP_THREADS (0 or unset = auto)."""
    raw = os.environ.get("CATNIP_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = min(8, os.cpu_count() or 1)
    return n


def parallel_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Order-preserving map across the configured worker count."""
    workers = worker_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class TestReport:
    __test__ = False  # not a pytest class, despite the name

    project_id: str
    outcomes: dict[str, str]  # test id -> pass | fail | error | skip

    @property
    def counted(self) -> int:
        return sum(1 for v in self.outcomes.values() if v != "skip")

    @property
    def passed(self) -> int:
        return sum(1 for v in self.outcomes.values() if v == "pass")

    @property
    def pass_fraction(self) -> float:
        # "error" counts against, "skip" leaves the denominator
        return self.passed / self.counted


@dataclass
class PoolEntry:
    program: Program
    report: TestReport
    path: Path | None = None  # original file, used as serialization template

    @property
    def project_id(self) -> str:
        return self.program.source_id

    @property
    def pass_fraction(self) -> float:
        return self.report.pass_fraction


@dataclass
class Threshold:
    # values above 1.0 are legal but unsatisfiable, matching nothing
    min_pass_fraction: float = 0.9

    def __post_init__(self) -> None:
        if self.min_pass_fraction < 0.0:
            raise ValueError(f"negative threshold: {self.min_pass_fraction}")

    @classmethod
    def parse(cls, value: float) -> "Threshold":
        """Accept a fraction (0.9) or a percentage (90)."""
        return cls(value / 100.0 if value > 1.0 else value)


@dataclass
class TargetSelection:
    target: PoolEntry
    distance: float
    ranked: list[tuple[str, float]] = field(default_factory=list)


def load_reports(path: str | Path) -> list[TestReport]:
    """Load a test-report file: {"projects": [{"id", "tests": {...}}, ...]}."""
    try:
        doc = json.loads(Path(path).read_bytes())
    except ValueError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}")
    if not isinstance(doc, dict) or not isinstance(doc.get("projects"), list):
        raise SchemaError(f"{path}: missing 'projects' array")
    reports = []
    seen = set()
    for entry in doc["projects"]:
        if not isinstance(entry, dict) or "id" not in entry:
            raise SchemaError(f"{path}: project entry without id")
        pid = str(entry["id"])
        if pid in seen:
            raise DuplicateProjectId(f"{path}: duplicate project id {pid!r}")
        seen.add(pid)
        tests = entry.get("tests")
        if not isinstance(tests, dict):
            raise SchemaError(f"{path}: project {pid!r} has no tests object")
        outcomes = {}
        for tid, outcome in tests.items():
            if outcome not in _OUTCOMES:
                raise SchemaError(
                    f"{path}: test {tid!r} of {pid!r} has outcome {outcome!r}"
                )
            outcomes[str(tid)] = outcome
        report = TestReport(project_id=pid, outcomes=outcomes)
        if report.counted == 0:
            raise EmptyReport(f"{path}: project {pid!r} has no non-skipped tests")
        reports.append(report)
    return reports


def load_pool(pool_dir: str | Path, reports: list[TestReport]) -> list[PoolEntry]:
    """Pair the *.json / *.sb3 files of a directory with their reports.

    Project id is the file stem; files without a report are skipped (they
    cannot qualify), reports without a file are ignored.
    """
    by_id = {r.project_id: r for r in reports}
    entries = []
    pool_dir = Path(pool_dir)
    files = sorted(
        [p for p in pool_dir.iterdir() if p.suffix in (".json", ".sb3")],
        key=lambda p: p.stem,
    )
    for path in files:
        report = by_id.get(path.stem)
        if report is None:
            continue
        entries.append(
            PoolEntry(program=parse_project(path), report=report, path=path)
        )
    return entries


def filter_candidates(
    pool: list[PoolEntry], threshold: Threshold
) -> list[PoolEntry]:
    """Keep the entries whose pass fraction meets the threshold (inclusive)."""
    kept = [e for e in pool if e.pass_fraction >= threshold.min_pass_fraction]
    if not kept:
        raise NoCandidates(
            f"no pool entry reaches pass fraction {threshold.min_pass_fraction}"
        )
    return kept


def select_target(
    source: Program,
    candidates: list[PoolEntry],
    params: PqParams = PqParams(),
    seed: int | None = None,
) -> TargetSelection:
    """Pick the candidate with minimal whole-program pq-gram distance.

    Ties go to the lexicographically smallest project id, or uniformly at
    random when a seed is given.
    """
    if not candidates:
        raise NoCandidates("empty candidate list")
    source_profile = program_profile(source, params)

    def one(entry: PoolEntry) -> float:
        return distance(source_profile, program_profile(entry.program, params))

    distances = parallel_map(one, candidates)
    ranked = sorted(
        zip((e.project_id for e in candidates), distances),
        key=lambda pair: (pair[1], pair[0]),
    )
    best_distance = ranked[0][1]
    tied = [pid for pid, d in ranked if d == best_distance]
    chosen = random.Random(seed).choice(tied) if seed is not None else tied[0]
    target = next(e for e in candidates if e.project_id == chosen)
    return TargetSelection(target=target, distance=best_distance, ranked=ranked)
