"""Command-line front end: validate, translate, analyze, diff.

Exit codes: 0 success, 1 semantic or validation failure, 2 I/O or parse
failure, 3 resource limit hit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import dft as _dft
from . import galileo as _galileo
from . import profiles as _profiles
from . import stochastics as _stochastics
from . import translate as _translate
from .export import export_dot, export_marking_graph_dot, export_pnml, export_text
from .gspn import IMMEDIATE, StateLimitExceeded, TIMED, build_marking_graph

EXIT_OK = 0
EXIT_SEMANTIC = 1
EXIT_IO = 2
EXIT_RESOURCE = 3

PROFILE_NAMES = [p.name for p in _profiles.PROFILES]


class _CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dft2gspn",
        description="Translate dynamic fault trees to stochastic Petri nets "
        "and analyse them under selectable semantics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_profile=True):
        p.add_argument("input", help="fault tree file (Galileo-style .dft)")
        if with_profile:
            p.add_argument(
                "--semantics",
                choices=PROFILE_NAMES,
                default="gspn-new",
                help="semantics profile (default: gspn-new)",
            )
        p.add_argument(
            "--claim-mode",
            choices=["early", "late", "late-early-fail"],
            help="override the profile's spare claiming discipline",
        )
        p.add_argument(
            "--claim-order",
            choices=["ordered", "arbitrary"],
            help="override the spare claiming order",
        )
        p.add_argument(
            "--strict-1-bounded-unavail",
            action="store_true",
            help="apply the template adaption keeping Unavail places 1-bounded",
        )
        p.add_argument(
            "--state-limit",
            type=int,
            default=1_000_000,
            help="abort exploration beyond this many markings",
        )
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p_validate = sub.add_parser("validate", help="check a fault tree against a profile")
    common(p_validate)

    p_translate = sub.add_parser("translate", help="emit the translated net")
    common(p_translate)
    p_translate.add_argument(
        "--format",
        choices=["pnml", "dot", "text", "marking-graph-dot"],
        default="pnml",
    )
    p_translate.add_argument("--output", help="write to this file instead of stdout")

    p_analyze = sub.add_parser("analyze", help="reachability and unreliability")
    common(p_analyze)
    p_analyze.add_argument(
        "--time", type=float, default=None, help="mission time for unreliability"
    )
    p_analyze.add_argument(
        "--goal", default=None, help="target node (default: the top event)"
    )

    p_diff = sub.add_parser("diff", help="compare all five semantics on one tree")
    common(p_diff, with_profile=False)
    p_diff.add_argument("--goal", default=None)
    return parser


def _read_tree(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise _CliFailure(EXIT_IO, f"cannot read {path}: {exc.strerror}")
    tree, errors, warnings = _galileo.parse_galileo_diagnostics(text)
    if errors:
        listing = "\n".join(f"{path}:{d}" for d in errors)
        raise _CliFailure(EXIT_IO, f"parse failed:\n{listing}")
    return tree, [f"{path}:{d}" for d in warnings]


def _options(args) -> _translate.TranslationOptions:
    return _translate.TranslationOptions(
        claim_mode=args.claim_mode,
        claim_order=args.claim_order,
        strict_1_bounded_unavail=args.strict_1_bounded_unavail,
    )


def _profile_reports(tree, profile_name):
    conventional = _dft.validate_conventional(tree)
    support = _dft.check_profile_support(tree, profile_name)
    return conventional, support


def cmd_validate(args) -> int:
    tree, parse_warnings = _read_tree(args.input)
    conventional, support = _profile_reports(tree, args.semantics)
    issues = {
        "errors": [str(i) for i in conventional.errors + support.errors],
        "warnings": parse_warnings
        + [str(i) for i in conventional.warnings + support.warnings],
    }
    solvable = None
    if not issues["errors"]:
        profile = _profiles.profile_by_name(args.semantics)
        constraints = _translate.generate_priority_constraints(tree, profile)
        try:
            _translate.solve_priorities(constraints)
            solvable = True
        except _translate.UnsatisfiablePrioritiesError as exc:
            solvable = False
            names = [tree.node(v).name for v in exc.cycle]
            issues["errors"].append(
                f"[priority-cycle] priority constraints are unsatisfiable: "
                f"cycle through {{{', '.join(names)}}}"
            )
    if args.json:
        print(json.dumps({"semantics": args.semantics, **issues,
                          "priorities_solvable": solvable}, indent=2, sort_keys=True))
    else:
        for w in issues["warnings"]:
            print(f"warning: {w}")
        for e in issues["errors"]:
            print(f"error: {e}")
        if not issues["errors"]:
            print(f"ok: {args.input} is valid under {args.semantics}")
    return EXIT_OK if not issues["errors"] else EXIT_SEMANTIC


def _translate_or_fail(tree, args, profile_name):
    try:
        return _translate.translate(tree, profile_name, _options(args))
    except _translate.UnsatisfiablePrioritiesError as exc:
        raise _CliFailure(EXIT_SEMANTIC, f"error: {exc}")
    except _translate.UnsupportedFeatureError as exc:
        listing = "; ".join(str(i) for i in exc.report.errors)
        raise _CliFailure(EXIT_SEMANTIC, f"error: {listing}")
    except _dft.InvalidDftError as exc:
        raise _CliFailure(EXIT_SEMANTIC, f"error: {exc}")


def cmd_translate(args) -> int:
    tree, _ = _read_tree(args.input)
    net = _translate_or_fail(tree, args, args.semantics)
    timed = sum(1 for t in net.transitions if t.kind == TIMED)
    immediate = len(net.transitions) - timed
    summary = f"places={len(net.place_names)} timed={timed} immediate={immediate}"

    if args.format == "pnml":
        payload = export_pnml(net)
    elif args.format == "dot":
        payload = export_dot(net)
    elif args.format == "text":
        payload = export_text(net)
    else:
        try:
            graph = build_marking_graph(net, state_limit=args.state_limit)
        except StateLimitExceeded as exc:
            raise _CliFailure(EXIT_RESOURCE, f"error: {exc}")
        payload = export_marking_graph_dot(graph)

    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as handle:
                handle.write(payload)
        except OSError as exc:
            raise _CliFailure(EXIT_IO, f"cannot write {args.output}: {exc.strerror}")
        print(summary)
    else:
        if args.json:
            print(json.dumps({"summary": summary, "document": payload}, sort_keys=True))
        else:
            print(summary)
            sys.stdout.write(payload)
    return EXIT_OK


def _analyze_one(tree, args, profile_name, goal_name):
    net = _translate_or_fail(tree, args, profile_name)
    try:
        graph = build_marking_graph(net, state_limit=args.state_limit)
    except StateLimitExceeded as exc:
        raise _CliFailure(EXIT_RESOURCE, f"error: {exc}")
    predicate = _stochastics.goal_failed_top(net, tree, goal_name)
    ma = _stochastics.extract_ma(graph, net, predicate)
    deterministic = _stochastics.is_deterministic(ma)
    reach = _stochastics.reach_min_max(ma)
    return net, ma, deterministic, reach


def cmd_analyze(args) -> int:
    tree, _ = _read_tree(args.input)
    goal = args.goal
    if goal is not None and not tree.has_node(goal):
        raise _CliFailure(EXIT_SEMANTIC, f"error: goal node {goal!r} does not exist")
    _, ma, deterministic, reach = _analyze_one(tree, args, args.semantics, goal)

    record = {
        "semantics": args.semantics,
        "goal": goal or tree.node(tree.top).name,
        "deterministic": deterministic,
        "reach_min": reach["min"],
        "reach_max": reach["max"],
    }
    if deterministic:
        ctmc = _stochastics.eliminate_vanishing(ma)
        if args.time is not None:
            record["time"] = args.time
            record["unreliability"] = _stochastics.unreliability(ctmc, args.time)
    elif args.time is not None:
        raise _CliFailure(
            EXIT_SEMANTIC,
            "error: timed analysis of a nondeterministic model is not supported; "
            "pick a deterministic profile or use the untimed min/max bounds",
        )

    if args.json:
        print(json.dumps(record, indent=2, sort_keys=True))
    else:
        if deterministic:
            print(
                f"semantics={record['semantics']} goal={record['goal']} "
                f"reach={_fmt(reach['min'])} (deterministic)"
            )
            if "unreliability" in record:
                print(
                    f"unreliability(t={args.time:g}) p={_fmt(record['unreliability'])}"
                )
        else:
            print(
                f"semantics={record['semantics']} goal={record['goal']} "
                f"min={_fmt(reach['min'])} max={_fmt(reach['max'])} (nondeterministic)"
            )
    return EXIT_OK


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def cmd_diff(args) -> int:
    tree, _ = _read_tree(args.input)
    goal = args.goal
    if goal is not None and not tree.has_node(goal):
        raise _CliFailure(EXIT_SEMANTIC, f"error: goal node {goal!r} does not exist")
    rows = []
    for profile in _profiles.PROFILES:
        conventional, support = _profile_reports(tree, profile.name)
        blockers = conventional.errors + support.errors
        if blockers:
            rows.append(
                {
                    "semantics": profile.name,
                    "supported": False,
                    "reason": "; ".join(str(i) for i in blockers),
                }
            )
            continue
        try:
            _, _, deterministic, reach = _analyze_one(tree, args, profile.name, goal)
        except _CliFailure as exc:
            rows.append(
                {"semantics": profile.name, "supported": False, "reason": str(exc)}
            )
            continue
        rows.append(
            {
                "semantics": profile.name,
                "supported": True,
                "reach_min": reach["min"],
                "reach_max": reach["max"],
                "deterministic": deterministic,
            }
        )

    if args.json:
        print(json.dumps({"goal": goal or tree.node(tree.top).name, "profiles": rows},
                         indent=2, sort_keys=True))
        return EXIT_OK
    header = f"{'semantics':<16} {'supported':<9} {'reach min':<12} {'reach max':<12} deterministic"
    print(header)
    for row in rows:
        if not row["supported"]:
            print(f"{row['semantics']:<16} {'no':<9} unsupported: {row['reason']}")
        else:
            print(
                f"{row['semantics']:<16} {'yes':<9} {_fmt(row['reach_min']):<12} "
                f"{_fmt(row['reach_max']):<12} {'yes' if row['deterministic'] else 'no'}"
            )
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "translate":
            return cmd_translate(args)
        if args.command == "analyze":
            return cmd_analyze(args)
        if args.command == "diff":
            return cmd_diff(args)
        parser.error(f"unknown command {args.command!r}")
    except _CliFailure as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
