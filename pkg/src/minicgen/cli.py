"""Command line front door.

Single-file mode runs one campaign and writes a test suite; directory
mode runs the whole corpus against its manifest and fails on any
conformance mismatch. Inspection flags (--dump-graph, --dump-labeled,
--dump-pc, --trace) print and exit without running a campaign.

Exit codes: 0 campaign complete, 1 corpus conformance mismatch, 2 bad
arguments or missing property file, 3 parse or type error in the
program, 4 unwritable output location.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bmc import STRATEGY_KINDUCTION, BmcConfig
from .errors import MiniCError
from .executor import Executor, TestCase
from .frontend import parse, pretty
from .instrument import inject_labels
from .orchestrator import (
    PROPERTY_BRANCHES,
    CampaignConfig,
    CampaignResult,
    run_campaign,
)
from .reachability import STRATEGIES as GOAL_STRATEGIES
from .reachability import build_graph, dump_graph
from .suiteio import (
    PROPERTY_BRANCHES_TEXT,
    PROPERTY_ERROR_TEXT,
    parse_property,
    write_suite,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_FRONTEND = 3
EXIT_OUTPUT = 4


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="minicgen",
        description="hybrid test generation for MiniC programs",
    )
    p.add_argument("path", help="program file or corpus directory")
    p.add_argument(
        "-a",
        type=int,
        choices=(32, 64),
        default=32,
        dest="arch",
        help="default width of input() reads (bits)",
    )
    p.add_argument("-p", dest="property_file", help="coverage property file")
    p.add_argument(
        "-s",
        dest="strategy",
        choices=("kinduction", "falsi", "incr", "fixed"),
        default="incr",
        help="bound scheduling strategy for the symbolic engine",
    )
    p.add_argument("--budget-execs", type=int, default=10_000)
    p.add_argument("--budget-secs", type=float, default=None)
    p.add_argument("--rng-seed", type=int, default=1)
    p.add_argument("--out", default="./test-suite")
    p.add_argument(
        "--strategy-goals",
        choices=GOAL_STRATEGIES,
        default="kind-weighted",
        help="goal prioritization for the symbolic engine",
    )
    p.add_argument("--fuzzer-only", action="store_true")
    p.add_argument("--loop-bound", type=int, default=2, help="lightened loop bound")
    p.add_argument(
        "--default-range",
        type=int,
        nargs=2,
        metavar=("LO", "HI"),
        default=(-1024, 1024),
        help="lightened input clamp range",
    )
    p.add_argument(
        "--input-domain",
        type=int,
        nargs=2,
        metavar=("LO", "HI"),
        default=None,
        help="restrict every generated input to this interval",
    )
    p.add_argument("--coverage-report", action="store_true")
    p.add_argument("--dump-graph", action="store_true")
    p.add_argument("--dump-labeled", action="store_true")
    p.add_argument("--dump-pc", action="store_true")
    p.add_argument("--unroll-k", type=int, default=2, help="bound for --dump-pc")
    p.add_argument(
        "--trace",
        metavar="INPUTS",
        help="run one comma-separated input vector and print its trace",
    )
    return p


def _load_property(args) -> tuple[str, str]:
    if args.property_file is None:
        return PROPERTY_BRANCHES, PROPERTY_BRANCHES_TEXT
    path = Path(args.property_file)
    if not path.is_file():
        raise _Usage(f"property file not found: {path}")
    text = path.read_text()
    try:
        kind = parse_property(text)
    except ValueError as e:
        raise _Usage(str(e))
    return kind, text.strip()


class _Usage(Exception):
    pass


def _config(args, property_kind: str) -> CampaignConfig:
    return CampaignConfig(
        rng_seed=args.rng_seed,
        budget_execs=args.budget_execs,
        budget_secs=args.budget_secs,
        goal_strategy=args.strategy_goals,
        bmc=BmcConfig(strategy=args.strategy),
        loop_bound=args.loop_bound,
        default_range=tuple(args.default_range),
        input_domain=tuple(args.input_domain) if args.input_domain else None,
        fuzzer_only=args.fuzzer_only,
        property_kind=property_kind,
    )


def _inspect(args, source: str, path: Path) -> int:
    program = parse(source, str(path), default_input_width=args.arch)
    labeled, table = inject_labels(program)
    if args.dump_labeled:
        sys.stdout.write(pretty(labeled))
        return EXIT_OK
    if args.dump_graph:
        graph = build_graph(labeled, table)
        sys.stdout.write(dump_graph(graph))
        return EXIT_OK
    if args.dump_pc:
        from .bmc import dump_paths, unroll

        sys.stdout.write(dump_paths(unroll(labeled, args.unroll_k)))
        return EXIT_OK
    assert args.trace is not None
    inputs = [int(v) for v in args.trace.split(",")] if args.trace else []
    ex = Executor(labeled, table)
    trace = ex.run(TestCase(inputs))
    print(f"outcome {trace.outcome}")
    print(f"covered {' '.join(str(g) for g in trace.covered)}")
    print(f"max-depth {trace.max_depth}")
    if trace.exit_value is not None:
        print(f"exit {trace.exit_value}")
    return EXIT_OK


def _run_single(args, path: Path, property_kind: str, property_text: str) -> int:
    source = path.read_text()
    if args.dump_labeled or args.dump_graph or args.dump_pc or args.trace is not None:
        return _inspect(args, source, path)
    program = parse(source, str(path), default_input_width=args.arch)
    cfg = _config(args, property_kind)
    result = run_campaign(program, cfg)
    try:
        write_suite(
            args.out,
            program_path=str(path),
            program_text=source,
            property_text=property_text,
            architecture=f"{args.arch}bit",
            testcases=[list(e.tc.inputs) for e in result.suite],
        )
        if args.coverage_report:
            report = result.tracer.coverage_report()
            (Path(args.out) / "coverage-report.txt").write_text(report)
            sys.stdout.write(report)
    except OSError as e:
        print(f"cannot write test suite: {e}", file=sys.stderr)
        return EXIT_OUTPUT
    for line in result.log:
        print(line)
    print(
        f"covered {len(result.covered & result.universe)}/{len(result.universe)} "
        f"execs {result.execs_used} suite {len(result.suite)} -> {args.out}"
    )
    return EXIT_OK


def _run_corpus(args, corpus_dir: Path, property_kind: str, property_text: str) -> int:
    manifest_path = corpus_dir / "manifest.json"
    if not manifest_path.is_file():
        raise _Usage(f"corpus directory has no manifest.json: {corpus_dir}")
    manifest = json.loads(manifest_path.read_text())
    defaults = manifest.get("defaults", {})
    mismatches = []
    report_lines = []
    out_root = Path(args.out)
    for entry in manifest["programs"]:
        name = entry["file"]
        path = corpus_dir / name
        source = path.read_text()
        program = parse(source, str(path), default_input_width=args.arch)
        cfg = _config(args, property_kind)
        cfg.budget_execs = entry.get(
            "budget_execs", defaults.get("budget_execs", args.budget_execs)
        )
        cfg.rng_seed = entry.get("rng_seed", defaults.get("rng_seed", args.rng_seed))
        if "input_domain" in entry:
            cfg.input_domain = tuple(entry["input_domain"])
        result = run_campaign(program, cfg)
        stem = Path(name).stem
        try:
            write_suite(
                out_root / stem,
                program_path=str(path),
                program_text=source,
                property_text=property_text,
                architecture=f"{args.arch}bit",
                testcases=[list(e.tc.inputs) for e in result.suite],
            )
        except OSError as e:
            print(f"cannot write test suite: {e}", file=sys.stderr)
            return EXIT_OUTPUT
        goals = len(result.table)
        covered = len(result.covered)
        wall = "0.000" if args.budget_secs is None else f"{result.wall_secs:.3f}"
        report_lines.append(
            f"{name} goals={goals} covered={covered} "
            f"execs={result.execs_used} wall={wall}"
        )
        if "goals" in entry and entry["goals"] != goals:
            mismatches.append(
                f"{name}: manifest says {entry['goals']} goals, program has {goals}"
            )
        if "expected_uncovered" in entry:
            want_uncovered = sorted(entry["expected_uncovered"])
            got_uncovered = sorted(set(range(goals)) - result.covered)
            if want_uncovered != got_uncovered:
                mismatches.append(
                    f"{name}: expected uncovered {want_uncovered}, got {got_uncovered}"
                )
    report = "\n".join(report_lines) + "\n"
    try:
        out_root.mkdir(parents=True, exist_ok=True)
        (out_root / "report.txt").write_text(report)
    except OSError as e:
        print(f"cannot write report: {e}", file=sys.stderr)
        return EXIT_OUTPUT
    sys.stdout.write(report)
    if mismatches:
        for m in mismatches:
            print(f"mismatch: {m}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    if args.strategy == STRATEGY_KINDUCTION:
        print(
            "warning: k-induction is approximated by incremental bound deepening",
            file=sys.stderr,
        )
    try:
        property_kind, property_text = _load_property(args)
        path = Path(args.path)
        if path.is_dir():
            return _run_corpus(args, path, property_kind, property_text)
        if not path.is_file():
            raise _Usage(f"no such program: {path}")
        return _run_single(args, path, property_kind, property_text)
    except _Usage as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except MiniCError as e:
        print(str(e), file=sys.stderr)
        return EXIT_FRONTEND
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
