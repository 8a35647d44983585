"""Reachability graph, the depth metric, and goal ranking."""

import heapq

import pytest
from hypothesis import given
from hypothesis import strategies as st

from minicgen import build_graph, dump_graph, rank_goals
from minicgen.reachability import UNREACHABLE_DEPTH

from conftest import build


def dijkstra_depths(graph):
    """Independent oracle: shortest path where entering a block costs 1
    if it carries an always-hit goal, else 0."""
    import collections

    succ = collections.defaultdict(list)
    for u, v, _k in graph.edges:
        succ[u].append(v)
    weight = {b.id: (1 if b.unconditional else 0) for b in graph.blocks}
    dist = {b.id: UNREACHABLE_DEPTH for b in graph.blocks}
    dist[graph.entry] = 0
    heap = [(0, graph.entry)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v in succ[u]:
            nd = d + weight[v]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def graph_of(src):
    labeled, table = build(src)
    return build_graph(labeled, table), table


def test_depths_match_dijkstra_on_corpus(corpus_programs):
    for name, (_src, _prog, labeled, table) in corpus_programs.items():
        graph = build_graph(labeled, table)
        dist = dijkstra_depths(graph)
        for b in graph.blocks:
            assert b.depth == dist[b.id], (name, b.id)
        for g in table.goals:
            assert g.depth == dist[graph.block_of(g.id)], (name, g.id)


def test_straight_line_depths():
    graph, table = graph_of(
        """
        int main() {
          int x = input();
          if (x > 0) {
            if (x > 10) {
              error();
            }
            return 1;
          }
          return 0;
        }
        """
    )
    by_id = {g.id: g.depth for g in table.goals}
    # the entry block is the search origin and costs nothing; each
    # nested then-arm adds one; the error label shares its block with
    # the inner then label, so both sit at the same depth
    assert by_id[0] == 0
    assert by_id[1] == 1  # then x>0
    assert by_id[2] == 2  # then x>10
    assert by_id[3] == 2  # error, same block
    assert by_id[4] == 2  # else x>10, still inside the outer then
    assert by_id[5] == 1  # else x>0


def test_assert_goal_does_not_weight_block():
    graph, table = graph_of(
        """
        int main() {
          int x = input();
          assert(x != 9);
          if (x > 0) {
            return 1;
          }
          return 0;
        }
        """
    )
    by_id = {g.id: g.depth for g in table.goals}
    # the failure goal is conditional, so the block after the assert
    # costs nothing extra
    assert by_id[2] == by_id[0] + 1


def test_loop_body_depth():
    graph, table = graph_of(
        """
        int main() {
          int i = 0;
          while (i < 3) {
            i = i + 1;
          }
          return i;
        }
        """
    )
    by_id = {g.id: g.depth for g in table.goals}
    assert by_id[0] == 0
    assert by_id[1] == 1


def test_unreachable_function_depth():
    # reachability is over the labeled control graph; a function only
    # called from dead code still has finite depth through the call edge
    graph, table = graph_of(
        """
        int helper(int v) {
          return v + 1;
        }

        int main() {
          int x = input();
          int r = helper(x);
          return r;
        }
        """
    )
    assert all(g.depth < UNREACHABLE_DEPTH for g in table.goals)


@given(st.integers(1, 8))
def test_ladder_depths_increase_by_one(n):
    # n nested ifs produce a clean depth ladder on the then-chain
    src = "int main() {\n  int x = input();\n"
    for i in range(n):
        src += "if (x > %d) {\n" % i
    src += "error();\n"
    for _ in range(n):
        src += "}\n"
    src += "return 0;\n}\n"
    graph, table = graph_of(src)
    then_depths = [g.depth for g in table.goals if g.kind == "then-branch"]
    assert then_depths == list(range(1, n + 1))
    err = [g for g in table.goals if g.kind == "error-reach"][0]
    assert err.depth == n


def test_rank_deep_first():
    graph, table = graph_of(
        """
        int main() {
          int x = input();
          if (x > 0) {
            if (x > 10) {
              return 2;
            }
            return 1;
          }
          return 0;
        }
        """
    )
    order = rank_goals(graph, "deep-first").order
    depths = [table.depth_of(g) for g in order]
    assert depths == sorted(depths, reverse=True)
    # ties break toward lower goal id
    for a, b in zip(order, order[1:]):
        if table.depth_of(a) == table.depth_of(b):
            assert a < b


def test_rank_kind_weighted_prefers_errors():
    graph, table = graph_of(
        """
        int main() {
          int x = input();
          if (x == 3) {
            error();
          }
          while (x > 0) {
            x = x - 1;
          }
          return 0;
        }
        """
    )
    order = rank_goals(graph, "kind-weighted").order
    kinds = [table.goal(g).kind for g in order]
    assert kinds[0] == "error-reach"
    assert kinds[-1] == "function-entry"


def test_rank_unknown_strategy():
    graph, _ = graph_of("int main() { return 0; }")
    with pytest.raises(ValueError):
        rank_goals(graph, "alphabetical")


def test_dump_graph_is_deterministic(corpus_programs):
    _src, _prog, labeled, table = corpus_programs["p09_deep.mc"]
    g1 = build_graph(labeled, table)
    text1 = dump_graph(g1)
    text2 = dump_graph(build_graph(labeled, table))
    assert text1 == text2
    assert text1.startswith("entry ")
    assert "goal" in text1 and "edge" in text1
