"""Acceptance gate: eight end-to-end criteria, one test each.

Campaign results are computed once per module and shared; every
criterion reads from the same cached runs so the whole gate stays fast
and internally consistent.
"""

import filecmp
import os
from itertools import product

import pytest

from minicgen.cli import main as cli_main
from minicgen.executor import Executor, TestCase, enumerate_inputs, replay_suite
from minicgen.frontend import Assert, ErrorReach, If, While
from minicgen.instrument import inject_labels
from minicgen.orchestrator import CampaignConfig, run_campaign
from minicgen.reachability import build_graph
from minicgen.suiteio import PROPERTY_BRANCHES_TEXT, read_suite, write_suite
from minicgen.tracer import ImpactScore, Tracer

from conftest import CORPUS, build

DOMAIN = (-8, 8)
DOMAIN_VALUES = list(range(DOMAIN[0], DOMAIN[1] + 1))


def campaign_config(entry, defaults, **overrides):
    cfg = CampaignConfig(
        rng_seed=entry.get("rng_seed", defaults["rng_seed"]),
        budget_execs=entry.get("budget_execs", defaults["budget_execs"]),
    )
    if "input_domain" in entry:
        cfg.input_domain = tuple(entry["input_domain"])
    for k, v in overrides.items():
        setattr(cfg, k, v)
    return cfg


@pytest.fixture(scope="module")
def campaigns(manifest, corpus_programs):
    """Hybrid and fuzzer-only runs for every corpus program under its
    manifest budget and pinned rng."""
    defaults = manifest["defaults"]
    out = {}
    for entry in manifest["programs"]:
        name = entry["file"]
        _src, prog, _labeled, _table = corpus_programs[name]
        out[name] = {
            "entry": entry,
            "hybrid": run_campaign(prog, campaign_config(entry, defaults)),
            "fuzzer": run_campaign(
                prog, campaign_config(entry, defaults, fuzzer_only=True)
            ),
        }
    return out


@pytest.fixture(scope="module")
def domain_campaigns(manifest, corpus_programs):
    """Campaigns restricted to the oracle-enumerable input domain."""
    defaults = manifest["defaults"]
    out = {}
    for entry in manifest["programs"]:
        if entry["sites"] > 3:
            continue
        name = entry["file"]
        _src, prog, _labeled, _table = corpus_programs[name]
        cfg = campaign_config(
            entry, defaults, budget_execs=6000, input_domain=DOMAIN
        )
        out[name] = run_campaign(prog, cfg)
    return out


def test_criterion_1_oracle_coverage_equivalence(
    manifest, corpus_programs, domain_campaigns
):
    assert len(domain_campaigns) == len(manifest["programs"])
    for name, result in domain_campaigns.items():
        _src, _prog, labeled, table = corpus_programs[name]
        sites = next(
            e["sites"] for e in manifest["programs"] if e["file"] == name
        )
        oracle = enumerate_inputs(Executor(labeled, table), sites, DOMAIN_VALUES)
        assert result.covered == oracle, (
            f"{name}: campaign covered {sorted(result.covered)}, "
            f"enumeration reaches {sorted(oracle)}"
        )


def test_criterion_2_witness_replay_soundness(campaigns, domain_campaigns):
    witnesses = 0
    for name, runs in campaigns.items():
        assert runs["hybrid"].hard_errors == 0, name
        assert runs["fuzzer"].hard_errors == 0, name
        statuses = runs["hybrid"].tracer.bmc_statuses.values()
        witnesses += sum(1 for s in statuses if s == "witness")
    for name, result in domain_campaigns.items():
        assert result.hard_errors == 0, name
        witnesses += sum(
            1 for s in result.tracer.bmc_statuses.values() if s == "witness"
        )
    assert witnesses > 0  # the criterion must not pass vacuously


def test_criterion_3_guard_penetration(campaigns):
    guard_programs = {
        name: runs
        for name, runs in campaigns.items()
        if runs["entry"].get("guarded_goals")
    }
    assert len(guard_programs) >= 5
    fuzzer_hits = hybrid_hits = total = 0
    for name, runs in guard_programs.items():
        guarded = set(runs["entry"]["guarded_goals"])
        assert runs["entry"].get("budget_execs", 10_000) == 10_000
        total += len(guarded)
        fuzzer_hits += len(runs["fuzzer"].covered & guarded)
        hybrid_hits += len(runs["hybrid"].covered & guarded)
        assert not (runs["fuzzer"].covered & guarded), (
            f"{name}: fuzzer-only broke the guard"
        )
        assert guarded <= runs["hybrid"].covered, (
            f"{name}: hybrid missed {sorted(guarded - runs['hybrid'].covered)}"
        )
    assert fuzzer_hits == 0 and hybrid_hits == total


def test_criterion_4_hybrid_dominance(campaigns):
    for name, runs in campaigns.items():
        hybrid, fuzzer = runs["hybrid"], runs["fuzzer"]
        assert hybrid.coverage >= fuzzer.coverage, (
            f"{name}: hybrid {hybrid.coverage:.3f} "
            f"< fuzzer-only {fuzzer.coverage:.3f}"
        )


IMPACT_FIXTURE_SRC = """
int main() {
  int x = input();
  if (x > 0) {
    if (x > 10) {
      error();
    }
  }
  return 0;
}
"""

DIAMOND_SRC = """
int main() {
  int x = input();
  int y = input();
  if (x > 0) {
    if (x > 10) {
      y = y + 1;
    }
  } else {
    y = y + 2;
  }
  if (y == 50) {
    error();
  }
  if (y > 100) {
    if (y > 200) {
      return 9;
    }
  }
  return y;
}
"""


def test_criterion_5_impact_and_seed_store_tables():
    # four tests over the six-goal program; all scores derived by hand
    labeled, table = build(IMPACT_FIXTURE_SRC)
    graph = build_graph(labeled, table)
    ex = Executor(labeled, table)
    tracer = Tracer(table, graph)
    for vec in ([0], [5], [11], [6]):
        tc = TestCase(vec)
        tracer.record(tc, ex.run(tc))
    assert tracer.impact(0) == ImpactScore(1, 1, 0)
    assert tracer.impact(1) == ImpactScore(0, 2, 1)
    assert tracer.impact(2) == ImpactScore(2, 2, 2)
    assert tracer.impact(3) == ImpactScore(0, 2, 3)
    assert [s.tc.id for s in tracer.select_seeds([0, 1, 2, 3], 2)] == [2, 0]
    assert [s.tc.id for s in tracer.select_seeds([0, 1, 2, 3], 3)] == [2, 0, 1]

    # six-event admission/eviction sequence at capacity two
    ex2 = Executor(labeled, table)
    tr2 = Tracer(table, graph, capacity=2)
    recorded = {}

    def run_and_record(key, vec):
        tc = TestCase(vec)
        trace = ex2.run(tc)
        tr2.record(tc, trace)
        recorded[key] = (tc, trace)
        return tc, trace

    decisions = []
    decisions.append(tr2.maybe_promote(*run_and_record("t0", [0])))
    decisions.append(tr2.maybe_promote(*run_and_record("t1", [5])))
    decisions.append(tr2.maybe_promote(*run_and_record("t2", [6])))
    decisions.append(tr2.maybe_promote(*recorded["t0"]))       # duplicate
    decisions.append(tr2.maybe_promote(*run_and_record("t3", [11])))
    decisions.append(tr2.maybe_promote(*run_and_record("t4", [-2])))
    assert decisions == [True, True, False, False, True, False]
    assert tr2.store.ids() == [3, 0]
    assert tr2.store.generation == 3

    # diamond graph: two covered stones on the way to the error goal at
    # depths 2 (then side) and 1 (else side); deeper off-path goals from
    # the third test must not distract the selection
    dl, dt = build(DIAMOND_SRC)
    dg = build_graph(dl, dt)
    dex = Executor(dl, dt)
    dtr = Tracer(dt, dg)
    for vec in ([15, 3], [-1, 7], [15, 300]):
        tc = TestCase(vec)
        dtr.record(tc, dex.run(tc))
    error_goal = next(g.id for g in dt.goals if g.kind == "error-reach")
    assert error_goal == 6
    stone = dtr.promote_incomplete_seed(error_goal)
    assert stone is not None
    assert stone.incomplete_for == error_goal
    assert stone.tc.id == 0
    assert stone.tc.inputs == [15, 3]


def test_criterion_6_full_corpus_rerun_determinism(tmp_path):
    os.environ["SOURCE_DATE_EPOCH"] = "1700000000"
    try:
        dirs = []
        for n in (1, 2):
            out = tmp_path / f"run{n}"
            code = cli_main([str(CORPUS), "--out", str(out)])
            assert code == 0
            dirs.append(out)
    finally:
        os.environ.pop("SOURCE_DATE_EPOCH", None)
    a, b = dirs
    files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    assert files_a == files_b
    for rel in files_a:
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), str(rel)


def count_goals_syntactically(program) -> int:
    functions = len(program.functions)
    ifs = whiles = error_sites = 0

    def walk(stmts):
        nonlocal ifs, whiles, error_sites
        for s in stmts:
            if isinstance(s, If):
                ifs += 1
                walk(s.then)
                walk(s.els or [])
            elif isinstance(s, While):
                whiles += 1
                walk(s.body)
            elif isinstance(s, (Assert, ErrorReach)):
                error_sites += 1

    for fn in program.functions:
        walk(fn.body)
    return functions + 2 * ifs + whiles + error_sites


def test_criterion_7_label_counting_rule(manifest, corpus_programs):
    for entry in manifest["programs"]:
        _src, prog, _labeled, table = corpus_programs[entry["file"]]
        closed_form = count_goals_syntactically(prog)
        assert closed_form == len(table) == entry["goals"], entry["file"]


def test_criterion_8_suite_replay_reproduces_coverage(
    campaigns, corpus_programs, tmp_path
):
    for name, runs in campaigns.items():
        result = runs["hybrid"]
        src, _prog, labeled, table = corpus_programs[name]
        suite_dir = tmp_path / name
        write_suite(
            suite_dir,
            program_path=name,
            program_text=src,
            property_text=PROPERTY_BRANCHES_TEXT,
            architecture="32bit",
            testcases=[list(e.tc.inputs) for e in result.suite],
        )
        data = read_suite(suite_dir)
        cases = [TestCase(vec) for vec in data.testcases]
        for n, tc in enumerate(cases, start=1):
            tc.id = n
        summary = replay_suite(Executor(labeled, table), cases)
        claimed = set()
        for e in result.suite:
            claimed |= set(e.covered)
        assert summary.covered == claimed, name
        assert result.covered & result.universe <= summary.covered, name
