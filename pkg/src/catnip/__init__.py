"""Next-step hint generation for Scratch projects.

Pipeline: parse sb3 projects into labeled ASTs, filter a pool of prior
solutions by automated-test pass rate, pick the pq-gram-nearest candidate as
target, match actors and scripts, diff the matched trees into addition and
deletion candidates, and dress those as structured hints. An evaluation
harness applies all hints and reports functional and quality deltas.
"""

from .errors import (
    CatnipError,
    DuplicateProjectId,
    EmptyReport,
    MalformedJson,
    NoCandidates,
    NoStage,
    NotAScratchProject,
    ParamMismatch,
    ReservedLabel,
    SchemaError,
    StaleHint,
    UnserializableNode,
    ZeroVariance,
)
from .model import (
    Actor,
    Node,
    Program,
    Script,
    iter_nodes,
    program_tree,
    programs_equal,
)
from .sb3 import ProjectFile, parse_project, serialize_project
from .pqgram import (
    PqGramProfile,
    PqParams,
    backend,
    distance,
    profile,
    program_distance,
)
from .pool import (
    PoolEntry,
    TargetSelection,
    TestReport,
    Threshold,
    filter_candidates,
    load_pool,
    load_reports,
    select_target,
)
from .matching import ActorMatch, MatchPlan, ScriptMatch, build_match_plan
from .diffing import DiffResult, NodeRef, diff_programs, diff_scripts
from .hints import Hint, HintSet, apply_hints, synthesize
from .stats import mann_whitney_u, pearson_r, vargha_delaney_a12
from .analysis import Metrics, compute_metrics, evaluate_corpus

__version__ = "0.1.0"

__all__ = [
    "Actor",
    "ActorMatch",
    "CatnipError",
    "DiffResult",
    "DuplicateProjectId",
    "EmptyReport",
    "Hint",
    "HintSet",
    "MalformedJson",
    "MatchPlan",
    "Metrics",
    "NoCandidates",
    "NoStage",
    "Node",
    "NodeRef",
    "NotAScratchProject",
    "ParamMismatch",
    "PoolEntry",
    "PqGramProfile",
    "PqParams",
    "Program",
    "ProjectFile",
    "ReservedLabel",
    "SchemaError",
    "Script",
    "ScriptMatch",
    "StaleHint",
    "TargetSelection",
    "TestReport",
    "Threshold",
    "UnserializableNode",
    "ZeroVariance",
    "apply_hints",
    "backend",
    "build_match_plan",
    "compute_metrics",
    "diff_programs",
    "diff_scripts",
    "distance",
    "evaluate_corpus",
    "filter_candidates",
    "iter_nodes",
    "load_pool",
    "load_reports",
    "mann_whitney_u",
    "parse_project",
    "pearson_r",
    "profile",
    "program_distance",
    "program_tree",
    "programs_equal",
    "select_target",
    "serialize_project",
    "synthesize",
    "vargha_delaney_a12",
]
