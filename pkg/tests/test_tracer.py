"""Coverage ledger, impact scores, seed store, BMC goal claiming."""

import pytest

from minicgen.executor import Executor, TestCase
from minicgen.reachability import build_graph, rank_goals
from minicgen.tracer import COVERING_CAP, ImpactScore, Tracer

from conftest import build

BRANCH = "int main() { int x = input(); if (x > 0) { return 1; } return 0; }"

NESTED = """
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


def make(src, capacity=64):
    labeled, table = build(src)
    graph = build_graph(labeled, table)
    ex = Executor(labeled, table)
    return ex, Tracer(table, graph, capacity=capacity), table, graph


def feed(ex, tracer, inputs):
    tc = TestCase(list(inputs))
    trace = ex.run(tc)
    delta = tracer.record(tc, trace)
    return tc, trace, delta


# -- recording ----------------------------------------------------------------

def test_record_assigns_ids_and_reports_first_time_goals():
    ex, tracer, table, _ = make(BRANCH)
    tc1, _, d1 = feed(ex, tracer, [5])
    assert tc1.id == 0 and d1 == [0, 1]
    tc2, _, d2 = feed(ex, tracer, [7])
    assert tc2.id == 1 and d2 == []
    tc3, _, d3 = feed(ex, tracer, [-1])
    assert tc3.id == 2 and d3 == [2]
    assert tracer.all_covered()
    assert tracer.coverage.first_test == [0, 0, 2]


def test_record_respects_preassigned_ids():
    ex, tracer, *_ = make(BRANCH)
    tc = TestCase([1])
    tc.id = 10
    tracer.record(tc, ex.run(tc))
    nxt, _, _ = feed(ex, tracer, [2])
    assert nxt.id == 11


def test_covering_list_caps_out():
    ex, tracer, *_ = make(BRANCH)
    for i in range(COVERING_CAP + 4):
        feed(ex, tracer, [i + 1])
    assert tracer.coverage.covering_tests[0] == list(range(COVERING_CAP))


# -- impact ---------------------------------------------------------------------

def test_impact_counts_solely_covered_goals():
    ex, tracer, *_ = make(BRANCH)
    feed(ex, tracer, [5])
    assert tracer.impact(0) == ImpactScore(2, 1, 0)  # alone on goals 0 and 1
    feed(ex, tracer, [9])
    assert tracer.impact(0) == ImpactScore(0, 1, 0)  # shared now
    feed(ex, tracer, [-3])
    assert tracer.impact(2) == ImpactScore(1, 1, 2)  # else-branch is its alone


def test_impact_ordering_key():
    a = ImpactScore(2, 1, 5)
    b = ImpactScore(2, 3, 6)
    c = ImpactScore(0, 9, 0)
    d = ImpactScore(2, 3, 9)
    assert sorted([a, b, c, d], key=ImpactScore.key) == [b, d, a, c]


def test_select_seeds_orders_and_dedups():
    ex, tracer, *_ = make(NESTED)
    feed(ex, tracer, [0])    # id 0: entry + outer else, alone on the else
    feed(ex, tracer, [11])   # id 1: error path, deepest
    feed(ex, tracer, [11])   # id 2: same coverage as id 1, later id
    seeds = tracer.select_seeds([0, 1, 2, 1, 0], 2)
    # uniqueness outranks depth; equal-impact ties break on lower id
    assert [s.tc.id for s in seeds] == [0, 1]
    assert seeds[0].impact.unique_labels == 1
    assert seeds[1].impact.unique_labels == 0  # ids 1 and 2 share their goals
    assert seeds[1].impact.max_depth > seeds[0].impact.max_depth


# -- seed store -----------------------------------------------------------------

def test_promotion_requires_a_recorded_test():
    ex, tracer, *_ = make(BRANCH)
    tc = TestCase([1])
    trace = ex.run(tc)
    with pytest.raises(ValueError):
        tracer.maybe_promote(tc, trace)


def test_promote_admits_until_capacity_then_evicts_on_merit():
    ex, tracer, *_ = make(NESTED, capacity=2)
    t0, tr0, _ = feed(ex, tracer, [0])
    assert tracer.maybe_promote(t0, tr0)
    assert tracer.store.ids() == [0]

    t1, tr1, _ = feed(ex, tracer, [1])   # outer then, inner else
    assert tracer.maybe_promote(t1, tr1)
    assert tracer.store.generation == 2

    # full store: an equal-or-worse candidate bounces; the refresh also
    # strips id 1's uniqueness since id 2 duplicates its coverage
    t2, tr2, _ = feed(ex, tracer, [2])
    assert not tracer.maybe_promote(t2, tr2)
    assert tracer.store.ids() == [0, 1]

    # two goals covered alone (error path) beats the weakest seed
    t3, tr3, _ = feed(ex, tracer, [40])
    assert tracer.maybe_promote(t3, tr3)
    assert tracer.store.ids() == [3, 0]


def test_promote_rejects_duplicate_ids():
    ex, tracer, *_ = make(BRANCH)
    t0, tr0, _ = feed(ex, tracer, [5])
    assert tracer.maybe_promote(t0, tr0)
    assert not tracer.maybe_promote(t0, tr0)
    assert tracer.store.generation == 1


def test_stored_impacts_refresh_before_comparison():
    ex, tracer, *_ = make(BRANCH, capacity=1)
    t0, tr0, _ = feed(ex, tracer, [5])
    tracer.maybe_promote(t0, tr0)
    assert tracer.store.seeds[0].impact.unique_labels == 2

    # id 1 duplicates id 0's coverage, stripping its uniqueness;
    # id 2 covers the else branch alone and must displace it
    t1, tr1, _ = feed(ex, tracer, [6])
    assert not tracer.maybe_promote(t1, tr1)
    assert tracer.store.seeds[0].impact.unique_labels == 0
    t2, tr2, _ = feed(ex, tracer, [-1])
    assert tracer.maybe_promote(t2, tr2)
    assert tracer.store.ids() == [2]


# -- goal claiming -----------------------------------------------------------

def test_next_goal_claims_each_goal_once():
    ex, tracer, table, graph = make(NESTED)
    ranking = rank_goals(graph, "kind-weighted")
    feed(ex, tracer, [0])  # covers entry and outer else
    claimed = []
    while (gid := tracer.next_goal_for_bmc(ranking)) is not None:
        claimed.append(gid)
    assert sorted(claimed) == sorted(set(range(len(table))) - {0, 5})
    assert claimed[0] == 3  # error goal ranks first under kind weighting
    assert tracer.next_goal_for_bmc(ranking) is None


def test_claimed_goals_are_not_rehanded_even_if_still_uncovered():
    ex, tracer, _, graph = make(BRANCH)
    ranking = rank_goals(graph, "deep-first")
    first = tracer.next_goal_for_bmc(ranking)
    second = tracer.next_goal_for_bmc(ranking)
    assert first != second


def test_mark_bmc_result_is_bookkeeping_only():
    ex, tracer, _, graph = make(BRANCH)
    tracer.mark_bmc_result(2, "unsat-at-bound")
    assert tracer.bmc_statuses == {2: "unsat-at-bound"}


# -- stepping stones ----------------------------------------------------------

def test_incomplete_seed_picks_deepest_covered_goal_on_path():
    ex, tracer, table, _ = make(NESTED)
    feed(ex, tracer, [0])  # id 0: entry + outer else
    feed(ex, tracer, [5])  # id 1: outer then, inner else
    error_goal = next(g.id for g in table.goals if g.kind == "error-reach")
    seed = tracer.promote_incomplete_seed(error_goal)
    assert seed is not None
    assert seed.incomplete_for == error_goal
    # entry (depth 0, test 0) and the outer then (depth 1, test 1) both
    # lie on the path to the error; the deeper stone wins
    assert seed.tc.id == 1


def test_incomplete_seed_none_when_nothing_on_path_is_covered():
    _, tracer, table, _ = make(NESTED)
    error_goal = next(g.id for g in table.goals if g.kind == "error-reach")
    assert tracer.promote_incomplete_seed(error_goal) is None


# -- reporting ----------------------------------------------------------------

def test_coverage_report_shape_and_determinism():
    reports = []
    for _ in range(2):
        ex, tracer, *_ = make(NESTED)
        for v in (0, 5, 11):
            tc, trace, _ = feed(ex, tracer, [v])
            tracer.maybe_promote(tc, trace)
        reports.append(tracer.coverage_report())
    assert reports[0] == reports[1]
    text = reports[0]
    assert text.startswith("covered 6/6\n")
    assert text.count("goal ") == 6
    assert "kind=error-reach" in text
    assert "seeds generation=" in text
