import json
import random

import pytest

from catnip import parse_project
from catnip.errors import DuplicateProjectId, EmptyReport, NoCandidates, SchemaError
from catnip.pool import (
    PoolEntry,
    TestReport,
    Threshold,
    filter_candidates,
    load_pool,
    load_reports,
    select_target,
)

from conftest import fruit_project, write_reports
from sb3build import write_project


def _reports_file(tmp_path, doc) -> str:
    path = tmp_path / "reports.json"
    path.write_text(json.dumps(doc))
    return path


def test_load_reports_basic(tmp_path):
    path = _reports_file(
        tmp_path,
        {"projects": [{"id": "s01", "tests": {"t1": "pass", "t2": "fail"}}]},
    )
    reports = load_reports(path)
    assert len(reports) == 1
    assert reports[0].project_id == "s01"
    assert reports[0].pass_fraction == 0.5


def test_load_reports_all_passing(tmp_path):
    tests = {f"t{i}": "pass" for i in range(28)}
    path = _reports_file(tmp_path, {"projects": [{"id": "m", "tests": tests}]})
    assert load_reports(path)[0].pass_fraction == 1.0


def test_load_reports_duplicate_id(tmp_path):
    path = _reports_file(
        tmp_path,
        {
            "projects": [
                {"id": "s01", "tests": {"t1": "pass"}},
                {"id": "s01", "tests": {"t1": "fail"}},
            ]
        },
    )
    with pytest.raises(DuplicateProjectId):
        load_reports(path)


def test_load_reports_schema_errors(tmp_path):
    with pytest.raises(SchemaError):
        load_reports(_reports_file(tmp_path, {"nope": []}))
    with pytest.raises(SchemaError):
        load_reports(_reports_file(tmp_path, {"projects": [{"id": "x"}]}))
    with pytest.raises(SchemaError):
        load_reports(
            _reports_file(
                tmp_path, {"projects": [{"id": "x", "tests": {"t": "maybe"}}]}
            )
        )


def test_load_reports_all_skipped_rejected(tmp_path):
    path = _reports_file(
        tmp_path, {"projects": [{"id": "x", "tests": {"t1": "skip", "t2": "skip"}}]}
    )
    with pytest.raises(EmptyReport):
        load_reports(path)


def test_error_counts_as_fail_skip_excluded():
    report = TestReport("x", {"a": "pass", "b": "error", "c": "skip"})
    assert report.counted == 2
    assert report.pass_fraction == 0.5


def _entry(pid: str, fraction: float, program) -> PoolEntry:
    total = 20
    passed = round(fraction * total)
    outcomes = {f"t{i}": "pass" if i < passed else "fail" for i in range(total)}
    program.source_id = pid
    return PoolEntry(program=program, report=TestReport(pid, outcomes))


@pytest.fixture()
def small_pool(tmp_path):
    path = write_project(tmp_path / "p.json", fruit_project())
    program = parse_project(path)
    return [
        _entry("a", 1.0, parse_project(path)),
        _entry("b", 0.8, parse_project(path)),
        _entry("c", 0.95, parse_project(path)),
    ]


def test_filter_keeps_qualifying_in_order(small_pool):
    kept = filter_candidates(small_pool, Threshold(0.9))
    assert [e.project_id for e in kept] == ["a", "c"]


def test_filter_zero_threshold_keeps_all(small_pool):
    assert len(filter_candidates(small_pool, Threshold(0.0))) == 3


def test_filter_empty_raises(small_pool):
    below_max = [e for e in small_pool if e.pass_fraction < 1.0]
    with pytest.raises(NoCandidates):
        filter_candidates(below_max, Threshold(0.99))


def test_filter_monotonic(small_pool):
    rng = random.Random(3)
    thresholds = sorted(rng.random() for _ in range(10))
    previous = None
    for t in thresholds:
        try:
            kept = {e.project_id for e in filter_candidates(small_pool, Threshold(t))}
        except NoCandidates:
            kept = set()
        if previous is not None:
            assert kept.issubset(previous)
        previous = kept


def test_threshold_parse_percent_and_fraction():
    assert Threshold.parse(0.9).min_pass_fraction == 0.9
    assert Threshold.parse(90).min_pass_fraction == 0.9
    assert Threshold.parse(70).min_pass_fraction == 0.7
    with pytest.raises(ValueError):
        Threshold(-0.1)


def test_threshold_above_one_matches_nothing(small_pool):
    with pytest.raises(NoCandidates):
        filter_candidates(small_pool, Threshold(1.1))


def test_eleven_step_corpus_counts(tmp_path):
    pool = []
    base = write_project(tmp_path / "base.json", fruit_project())
    for i in range(11):
        pool.append(_entry(f"p{i:02d}", i / 10.0, parse_project(base)))
    assert len(filter_candidates(pool, Threshold(0.9))) == 2
    assert len(filter_candidates(pool, Threshold(0.7))) == 4
    assert len(filter_candidates(pool, Threshold(0.0))) == 11


def test_select_target_tie_break_by_id(tmp_path):
    base = write_project(tmp_path / "base.json", fruit_project())
    source = parse_project(base)
    candidates = [
        _entry("c", 1.0, parse_project(base)),
        _entry("a", 1.0, parse_project(base)),
        _entry("b", 1.0, parse_project(base)),
    ]
    selection = select_target(source, candidates)
    assert selection.target.project_id == "a"
    assert selection.distance == 0.0
    assert [pid for pid, _ in selection.ranked] == ["a", "b", "c"]


def test_select_target_prefers_nearest(tmp_path, fruit_corpus):
    # s1 is one block short of complete; complete must be nearer to s1
    # than the structurally more different students
    entries = load_pool(
        fruit_corpus["pool"], load_reports(fruit_corpus["reports"])
    )
    source = parse_project(fruit_corpus["pool"] / "s1.json")
    others = [e for e in entries if e.project_id != "s1"]
    selection = select_target(source, others)
    assert selection.target.project_id == "complete"
    assert selection.ranked == sorted(
        selection.ranked, key=lambda pair: (pair[1], pair[0])
    )
    assert all(selection.distance <= d for _, d in selection.ranked)


def test_select_target_seeded_reproducible(tmp_path):
    base = write_project(tmp_path / "base.json", fruit_project())
    source = parse_project(base)
    candidates = [_entry(pid, 1.0, parse_project(base)) for pid in "abcd"]
    first = select_target(source, candidates, seed=7).target.project_id
    second = select_target(source, candidates, seed=7).target.project_id
    assert first == second


def test_select_target_empty_raises(tmp_path):
    base = write_project(tmp_path / "base.json", fruit_project())
    with pytest.raises(NoCandidates):
        select_target(parse_project(base), [])


def test_load_pool_pairs_files_with_reports(fruit_corpus):
    entries = load_pool(fruit_corpus["pool"], load_reports(fruit_corpus["reports"]))
    assert [e.project_id for e in entries] == [
        "complete",
        "s1",
        "s2",
        "s3",
        "s4",
        "s5",
    ]
    assert all(e.report.project_id == e.project_id for e in entries)
    assert all(e.path is not None for e in entries)
