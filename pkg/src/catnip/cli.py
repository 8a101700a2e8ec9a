"""Command-line entry point.

Subcommands: profile, distance, hint, apply, eval. Machine output (json
format, the default) goes to stdout; diagnostics go to stderr. Exit codes:
0 success, 2 parse/schema error, 3 no candidates, 4 stale or invalid hints.
The CATNIP_THREADS environment variable caps worker threads (0 = auto).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import evaluate_corpus
from .errors import (
    CatnipError,
    NoCandidates,
    SchemaError,
    StaleHint,
)
from .hints import HintSet, apply_hints
from .model import Node
from .pipeline import hints_for_source
from .pool import Threshold, load_pool, load_reports
from .pqgram import PqParams, backend, profile, tree_distance
from .sb3 import (
    load_tree_json,
    looks_like_tree_json,
    parse_project,
    serialize_project,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NO_CANDIDATES = 3
EXIT_STALE = 4


def _load_tree(path: str) -> Node:
    """A profile/distance operand: a Scratch project or a bare labeled tree."""
    from .model import program_tree

    if looks_like_tree_json(path):
        return load_tree_json(path)
    return program_tree(parse_project(path))


def _add_pq(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=int, default=2, help="ancestor count (default 2)")
    parser.add_argument("--q", type=int, default=3, help="children window (default 3)")


def _add_format(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format", choices=("json", "pretty"), default="json", help="output style"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catnip", description="Next-step hint generation for Scratch projects"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_profile = sub.add_parser("profile", help="pq-gram profile of a project")
    p_profile.add_argument("project")
    _add_pq(p_profile)
    p_profile.add_argument("--top", type=int, default=10, help="grams to list")
    _add_format(p_profile)

    p_dist = sub.add_parser("distance", help="pq-gram distance of two projects")
    p_dist.add_argument("project_a")
    p_dist.add_argument("project_b")
    _add_pq(p_dist)
    _add_format(p_dist)

    p_hint = sub.add_parser("hint", help="generate hints for a source project")
    p_hint.add_argument("source")
    p_hint.add_argument("--pool", required=True, help="directory of pool projects")
    p_hint.add_argument("--reports", required=True, help="test report JSON")
    p_hint.add_argument(
        "--threshold",
        type=float,
        default=0.9,
        help="pass-rate threshold, fraction or percent (default 0.9)",
    )
    _add_pq(p_hint)
    p_hint.add_argument("--seed", type=int, default=None, help="random tie-break seed")
    p_hint.add_argument(
        "--explain", action="store_true", help="include ranking and match plan"
    )
    p_hint.add_argument("--out", default=None, help="write output here, not stdout")
    _add_format(p_hint)

    p_apply = sub.add_parser("apply", help="apply a hint file to a project")
    p_apply.add_argument("source")
    p_apply.add_argument("--hints", required=True, help="hint JSON file")
    p_apply.add_argument("--target", required=True, help="the hint target project")
    p_apply.add_argument("--out", default=None, help="write project.json here")

    p_eval = sub.add_parser("eval", help="leave-one-out corpus evaluation")
    p_eval.add_argument("--pool", required=True)
    p_eval.add_argument("--reports", required=True)
    p_eval.add_argument("--threshold", type=float, default=0.9)
    _add_pq(p_eval)
    p_eval.add_argument("--seed", type=int, default=None)
    p_eval.add_argument("--out-dir", required=True, help="output directory")
    p_eval.add_argument(
        "--after-reports", default=None, help="report JSON for the patched programs"
    )
    _add_format(p_eval)

    return parser


def cmd_profile(args: argparse.Namespace) -> int:
    params = PqParams(args.p, args.q)
    prof = profile(_load_tree(args.project), params)
    top = sorted(prof.grams.items(), key=lambda kv: (-kv[1], kv[0]))[: args.top]
    if args.format == "json":
        doc = {
            "file": args.project,
            "p": params.p,
            "q": params.q,
            "backend": backend(),
            "size": prof.size,
            "distinct": len(prof.grams),
            "top": [{"gram": list(g), "count": c} for g, c in top],
        }
        print(json.dumps(doc, indent=2))
    else:
        print(f"{args.project}: {prof.size} grams ({len(prof.grams)} distinct)")
        for gram, count in top:
            print(f"  {count:6d}  {' '.join(gram)}")
    return EXIT_OK


def cmd_distance(args: argparse.Namespace) -> int:
    params = PqParams(args.p, args.q)
    value = tree_distance(_load_tree(args.project_a), _load_tree(args.project_b), params)
    if args.format == "json":
        doc = {
            "a": args.project_a,
            "b": args.project_b,
            "p": params.p,
            "q": params.q,
            "distance": value,
        }
        print(json.dumps(doc, indent=2))
    else:
        print(f"{value:.4f}")
    return EXIT_OK


def cmd_hint(args: argparse.Namespace) -> int:
    params = PqParams(args.p, args.q)
    threshold = Threshold.parse(args.threshold)
    source = parse_project(args.source)
    entries = load_pool(args.pool, load_reports(args.reports))
    run = hints_for_source(source, entries, threshold, params, args.seed)
    doc = run.to_json(explain=args.explain)
    text = json.dumps(doc, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if args.format == "pretty" and not args.out:
        print(
            f"{len(run.hints.hints)} hints from {run.hints.target_id}",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_apply(args: argparse.Namespace) -> int:
    try:
        hint_set = HintSet.loads(Path(args.hints).read_text())
    except (OSError, ValueError, KeyError) as exc:
        raise StaleHint(f"unreadable hint file {args.hints}: {exc}")
    source = parse_project(args.source)
    target = parse_project(args.target)
    patched = apply_hints(source, hint_set, target)
    data = serialize_project(patched, args.source)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.write("\n")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    params = PqParams(args.p, args.q)
    threshold = Threshold.parse(args.threshold)
    summary = evaluate_corpus(
        args.pool,
        args.reports,
        threshold,
        params,
        out_dir=args.out_dir,
        after_reports_path=args.after_reports,
        seed=args.seed,
    )
    if args.format == "json":
        print(summary.dumps())
    else:
        agg = summary.aggregates
        print(f"projects: {agg['projects']} (with hints: {agg['projects_with_hints']})")
        for key in ("block_count", "dead_code_scripts", "empty_scripts"):
            print(
                f"  {key}: {agg[f'mean_{key}_before']:.2f} -> "
                f"{agg[f'mean_{key}_after']:.2f}"
            )
    return EXIT_OK


_COMMANDS = {
    "profile": cmd_profile,
    "distance": cmd_distance,
    "hint": cmd_hint,
    "apply": cmd_apply,
    "eval": cmd_eval,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NoCandidates as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CANDIDATES
    except StaleHint as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STALE
    except (SchemaError, CatnipError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
