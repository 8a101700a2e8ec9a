from __future__ import annotations

import json
from pathlib import Path

import pytest

from sb3build import (
    Blk,
    bcast,
    block_in,
    menu,
    num,
    project_doc,
    stack,
    stage,
    target,
    text,
    write_project,
)

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def bowl_only_path() -> Path:
    return FIXTURES / "bowl_only.json"


@pytest.fixture(scope="session")
def empty_stage_path() -> Path:
    return FIXTURES / "empty_stage.json"


# ---------------------------------------------------------------------------
# fruit-catching style corpus
# ---------------------------------------------------------------------------

# each omittable block has leaf-only children and sits in a chain that keeps
# at least one other member, so dropping it changes exactly one fingerprint
OMITTABLE = {
    "stage_setvar": "data_setvariableto",
    "bowl_goto": "motion_gotoxy",
    "apple_goto": "motion_gotoxy",
    "apple_changevar": "data_changevariableby",
    "apple_stop": "control_stop",
}


def fruit_project(
    omit: set[str] | None = None,
    extra_apple_script: bool = False,
    loose_bowl: bool = False,
) -> dict:
    """A small catch-the-fruit game: stage score reset, bowl steering, apple
    fall loop. ``omit`` drops single statement blocks (all with leaf-only
    children) to derive "student" variants."""
    omit = omit or set()

    stage_chain = [Blk("event_whenflagclicked")]
    if "stage_setvar" not in omit:
        stage_chain.append(
            Blk(
                "data_setvariableto",
                fields={"VARIABLE": ("Score", "var_Score")},
                inputs={"VALUE": text("0")},
            )
        )

    bowl_if_inputs = {
        "CONDITION": block_in(
            Blk(
                "sensing_keypressed",
                inputs={
                    "KEY_OPTION": menu(
                        "sensing_keyoptions", "KEY_OPTION", "left arrow"
                    )
                },
            )
        ),
    }
    bowl_if_inputs["SUBSTACK"] = stack(
        Blk("motion_changexby", inputs={"DX": num(-10)})
    )
    bowl_chain = [Blk("event_whenflagclicked")]
    if "bowl_goto" not in omit:
        bowl_chain.append(Blk("motion_gotoxy", inputs={"X": num(0), "Y": num(-140)}))
    bowl_chain.append(
        Blk(
            "control_forever",
            inputs={"SUBSTACK": stack(Blk("control_if", inputs=bowl_if_inputs))},
        )
    )
    bowl_scripts = [bowl_chain]
    if loose_bowl:
        bowl_scripts.append(
            [
                Blk("motion_movesteps", inputs={"STEPS": num(10)}),
                Blk("motion_turnright", inputs={"DEGREES": num(15)}),
            ]
        )

    apple_chain = [Blk("event_whenflagclicked")]
    if "apple_goto" not in omit:
        apple_chain.append(Blk("motion_gotoxy", inputs={"X": num(36), "Y": num(170)}))
    if_body = []
    if "apple_changevar" not in omit:
        if_body.append(
            Blk(
                "data_changevariableby",
                fields={"VARIABLE": ("Score", "var_Score")},
                inputs={"VALUE": num(1)},
            )
        )
    if "apple_stop" not in omit:
        if_body.append(Blk("control_stop", fields={"STOP_OPTION": "all"}))
    apple_chain.append(
        Blk(
            "control_forever",
            inputs={
                "SUBSTACK": stack(
                    Blk("motion_changeyby", inputs={"DY": num(-5)}),
                    Blk(
                        "control_if",
                        inputs={
                            "CONDITION": block_in(
                                Blk(
                                    "sensing_touchingobject",
                                    inputs={
                                        "TOUCHINGOBJECTMENU": menu(
                                            "sensing_touchingobjectmenu",
                                            "TOUCHINGOBJECTMENU",
                                            "Bowl",
                                        )
                                    },
                                )
                            ),
                            "SUBSTACK": stack(*if_body),
                        },
                    ),
                )
            },
        )
    )
    apple_scripts = [apple_chain]
    if extra_apple_script:
        apple_scripts.append(
            [
                Blk(
                    "event_whenkeypressed",
                    fields={"KEY_OPTION": "space"},
                ),
                Blk("motion_changexby", inputs={"DX": num(4)}),
            ]
        )

    return project_doc(
        stage(stage_chain, variables={"Score": 0}),
        target("Bowl", *bowl_scripts),
        target("Apple", *apple_scripts),
    )


def write_reports(path: Path, passes: dict[str, tuple[int, int]]) -> Path:
    projects = []
    for pid, (passed, total) in passes.items():
        tests = {
            f"t{i:02d}": "pass" if i < passed else "fail" for i in range(total)
        }
        projects.append({"id": pid, "tests": tests})
    path.write_text(json.dumps({"projects": projects}))
    return path


STUDENTS = {
    "s1": {"apple_stop"},
    "s2": {"stage_setvar"},
    "s3": {"bowl_goto"},
    "s4": {"apple_changevar"},
    "s5": {"apple_goto"},
}


@pytest.fixture(scope="session")
def fruit_corpus(tmp_path_factory) -> dict:
    """Pool dir with the complete solution and five one-block-short students."""
    pool = tmp_path_factory.mktemp("fruit-pool")
    write_project(pool / "complete.json", fruit_project())
    for sid, omit in STUDENTS.items():
        write_project(pool / f"{sid}.json", fruit_project(omit=omit))
    reports = write_reports(
        pool / "reports.json",
        {
            "complete": (28, 28),
            "s1": (24, 28),
            "s2": (22, 28),
            "s3": (23, 28),
            "s4": (21, 28),
            "s5": (20, 28),
        },
    )
    return {
        "pool": pool,
        "reports": reports,
        "missing": {
            sid: OMITTABLE[next(iter(omit))] for sid, omit in STUDENTS.items()
        },
    }
