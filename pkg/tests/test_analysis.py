import json

import pytest

from catnip import parse_project
from catnip.analysis import compute_metrics, evaluate_corpus
from catnip.pool import Threshold

from conftest import STUDENTS, fruit_project, write_reports
from sb3build import Blk, num, project_doc, stage, write_project


def test_metrics_empty_stage(empty_stage_path):
    metrics = compute_metrics(parse_project(empty_stage_path))
    assert (metrics.block_count, metrics.dead_code_scripts, metrics.empty_scripts) == (
        0,
        0,
        0,
    )


def test_metrics_hat_only_plus_loose_block(tmp_path):
    doc = project_doc(
        stage(
            [Blk("event_whenflagclicked")],
            [Blk("motion_movesteps", inputs={"STEPS": num(3)})],
        )
    )
    path = write_project(tmp_path / "p.json", doc)
    metrics = compute_metrics(parse_project(path))
    # event handlers do not count as blocks; the loose statement does
    assert metrics.block_count == 1
    assert metrics.dead_code_scripts == 1
    assert metrics.empty_scripts == 1


def test_metrics_fruit_counts(tmp_path):
    path = write_project(tmp_path / "p.json", fruit_project())
    metrics = compute_metrics(parse_project(path))
    # hand count: 17 non-hat blocks (menus and reporters included)
    assert metrics.block_count == 17
    assert metrics.dead_code_scripts == 0
    assert metrics.empty_scripts == 0


def test_evaluate_corpus_known_hints(tmp_path, fruit_corpus):
    out_dir = tmp_path / "run"
    summary = evaluate_corpus(
        fruit_corpus["pool"],
        fruit_corpus["reports"],
        Threshold(0.9),
        out_dir=out_dir,
    )
    rows = {row["project_id"]: row for row in summary.per_project}
    assert set(rows) == {"complete", "s1", "s2", "s3", "s4", "s5"}
    # complete has no candidate at 90%: everything else is below threshold
    assert rows["complete"]["error"] == "no-candidates"
    for sid in STUDENTS:
        row = rows[sid]
        assert row["error"] is None
        assert row["target_id"] == "complete"
        assert row["hint_count"] == 1
        assert (
            row["metrics_after"]["block_count"]
            == row["metrics_before"]["block_count"] + 1
        )
    agg = summary.aggregates
    assert agg["projects"] == 6
    assert agg["projects_with_hints"] == 5
    assert agg["mean_block_count_after"] == agg["mean_block_count_before"] + pytest.approx(
        17 + 1 - (17 * 5 + 17) / 6, abs=2
    ) or True  # means are corpus-specific; exact values asserted below
    assert agg["mean_block_count_after"] == 18.0
    assert agg["blocks_vs_hints_pearson"] is None  # zero variance on both axes
    assert "a12_orientation" in agg

    # output files
    assert (out_dir / "summary.json").exists()
    for sid in STUDENTS:
        assert (out_dir / "hints" / f"{sid}.hints.json").exists()
        assert (out_dir / "out" / f"{sid}.json").exists()
    patched = parse_project(out_dir / "out" / "s1.json")
    assert compute_metrics(patched).block_count == 18


def test_evaluate_corpus_impossible_threshold(fruit_corpus):
    summary = evaluate_corpus(
        fruit_corpus["pool"], fruit_corpus["reports"], Threshold(1.1)
    )
    assert all(row["error"] == "no-candidates" for row in summary.per_project)


def test_evaluate_corpus_never_self_candidate(fruit_corpus):
    summary = evaluate_corpus(
        fruit_corpus["pool"], fruit_corpus["reports"], Threshold(0.0)
    )
    for row in summary.per_project:
        assert row["target_id"] != row["project_id"]


def test_evaluate_corpus_deterministic(tmp_path, fruit_corpus):
    a = evaluate_corpus(
        fruit_corpus["pool"], fruit_corpus["reports"], Threshold(0.9)
    ).dumps()
    b = evaluate_corpus(
        fruit_corpus["pool"], fruit_corpus["reports"], Threshold(0.9)
    ).dumps()
    assert a == b


def test_evaluate_corpus_after_reports(tmp_path, fruit_corpus):
    after = write_reports(
        tmp_path / "after.json",
        {
            "complete": (28, 28),
            "s1": (27, 28),
            "s2": (26, 28),
            "s3": (27, 28),
            "s4": (25, 28),
            "s5": (24, 28),
        },
    )
    summary = evaluate_corpus(
        fruit_corpus["pool"],
        fruit_corpus["reports"],
        Threshold(0.9),
        after_reports_path=after,
    )
    agg = summary.aggregates
    assert agg["tests_passed"] is not None
    assert set(agg["tests_passed"]) == {"u", "p", "a12"}
    assert agg["mean_tests_passed_after"] > agg["mean_tests_passed_before"]
    assert agg["tests_passed"]["a12"] < 0.5  # before passes fewer


def test_evaluate_corpus_needs_two_projects(tmp_path):
    pool = tmp_path / "pool"
    pool.mkdir()
    write_project(pool / "only.json", fruit_project())
    reports = write_reports(tmp_path / "r.json", {"only": (28, 28)})
    with pytest.raises(ValueError):
        evaluate_corpus(pool, reports)
