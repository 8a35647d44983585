"""Control-flow graph over the labeled program, goal depths, goal ranking.

Blocks hold straight-line statement runs; edges carry one of seven kinds
(fallthrough, then, else, loop-back, loop-exit, call, return). A goal's
depth is the minimum number of goal-bearing blocks entered on any path
from the entry block to the goal's block, where "goal-bearing" counts
only unconditionally-hit labels (assertion-failure goals are conditional
and weightless). Measuring depth this way guarantees that any execution
covering a goal at depth d also covers some goal at every smaller depth.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .frontend import (
    Assert,
    Assign,
    Call,
    CallStmt,
    Decl,
    ErrorReach,
    FunctionDef,
    If,
    Label,
    Program,
    Return,
    Stmt,
    While,
)
from .instrument import GoalTable

UNREACHABLE_DEPTH = 2**31 - 1

EDGE_KINDS = (
    "fallthrough", "then", "else", "loop-back", "loop-exit", "call", "return",
)


@dataclass
class BasicBlock:
    id: int
    function: str
    goal_ids: list[int] = field(default_factory=list)
    # goal ids hit by merely entering the block (not assertion failures)
    unconditional: list[int] = field(default_factory=list)
    depth: int = UNREACHABLE_DEPTH


@dataclass
class ReachabilityGraph:
    blocks: list[BasicBlock]
    edges: list[tuple[int, int, str]]
    entry: int
    table: GoalTable
    goal_block: dict[int, int]

    def block_of(self, goal_id: int) -> int:
        return self.goal_block[goal_id]

    def successors(self, block_id: int) -> list[tuple[int, str]]:
        return [(v, k) for (u, v, k) in self.edges if u == block_id]


@dataclass
class GoalRanking:
    order: list[int]
    strategy: str


class _Builder:
    def __init__(self, program: Program, table: GoalTable):
        self.program = program
        self.table = table
        self.blocks: list[BasicBlock] = []
        self.edges: set[tuple[int, int, str]] = set()
        self.fn_entry: dict[str, int] = {}
        self.fn_returns: dict[str, list[int]] = {}
        # (caller block, callee, continuation block) resolved after all
        # functions are laid out
        self.pending_calls: list[tuple[int, str, int]] = []

    def new_block(self, fn: str) -> int:
        b = BasicBlock(len(self.blocks), fn)
        self.blocks.append(b)
        return b.id

    def edge(self, u: int, v: int, kind: str):
        self.edges.add((u, v, kind))

    def build(self) -> ReachabilityGraph:
        for fn in self.program.functions:
            self.build_function(fn)
        for caller_block, callee, cont in self.pending_calls:
            self.edge(caller_block, self.fn_entry[callee], "call")
            for ret_block in self.fn_returns[callee]:
                self.edge(ret_block, cont, "return")
        goal_block: dict[int, int] = {}
        for b in self.blocks:
            for gid in b.goal_ids:
                goal_block[gid] = b.id
        missing = [g.id for g in self.table.goals if g.id not in goal_block]
        if missing:
            raise AssertionError(f"goals not placed in any block: {missing}")
        graph = ReachabilityGraph(
            blocks=self.blocks,
            edges=sorted(self.edges),
            entry=self.fn_entry[self.program.entry],
            table=self.table,
            goal_block=goal_block,
        )
        _compute_depths(graph)
        self.table.by_block = {
            b.id: list(b.goal_ids) for b in self.blocks if b.goal_ids
        }
        return graph

    def build_function(self, fn: FunctionDef):
        entry = self.new_block(fn.name)
        self.fn_entry[fn.name] = entry
        self.fn_returns[fn.name] = []
        self.flatten(fn.body, entry, fn)

    def place_goal(self, block: int, goal_id: int, unconditional: bool):
        b = self.blocks[block]
        b.goal_ids.append(goal_id)
        if unconditional:
            b.unconditional.append(goal_id)

    def stmt_call(self, st: Stmt) -> Call | None:
        if isinstance(st, Decl) and isinstance(st.init, Call):
            return st.init
        if isinstance(st, Assign) and isinstance(st.value, Call):
            return st.value
        if isinstance(st, CallStmt):
            return st.call
        return None

    def flatten(self, stmts: list[Stmt], cur: int, fn: FunctionDef) -> int | None:
        """Lay statements into blocks starting at `cur`; returns the block
        that falls through to whatever follows, or None if all paths
        terminated."""
        for st in stmts:
            if cur is None:
                # Statically unreachable tail (e.g. after an if whose arms
                # all return); park it in a fresh disconnected block.
                cur = self.new_block(fn.name)
            if isinstance(st, Label):
                self.place_goal(cur, st.goal_id, True)
            elif isinstance(st, Assert):
                self.place_goal(cur, st.goal_id, False)
            elif isinstance(st, ErrorReach):
                return None
            elif isinstance(st, Return):
                self.fn_returns[fn.name].append(cur)
                return None
            elif isinstance(st, If):
                then_b = self.new_block(fn.name)
                else_b = self.new_block(fn.name)
                self.edge(cur, then_b, "then")
                self.edge(cur, else_b, "else")
                then_end = self.flatten(st.then, then_b, fn)
                else_end = self.flatten(st.els or [], else_b, fn)
                if then_end is None and else_end is None:
                    cur = None
                    continue
                join = self.new_block(fn.name)
                if then_end is not None:
                    self.edge(then_end, join, "fallthrough")
                if else_end is not None:
                    self.edge(else_end, join, "fallthrough")
                cur = join
            elif isinstance(st, While):
                header = self.new_block(fn.name)
                self.edge(cur, header, "fallthrough")
                body_b = self.new_block(fn.name)
                exit_b = self.new_block(fn.name)
                self.edge(header, body_b, "then")
                self.edge(header, exit_b, "loop-exit")
                body_end = self.flatten(st.body, body_b, fn)
                if body_end is not None:
                    self.edge(body_end, header, "loop-back")
                cur = exit_b
            else:
                call = self.stmt_call(st)
                if call is not None:
                    cont = self.new_block(fn.name)
                    self.pending_calls.append((cur, call.name, cont))
                    cur = cont
        return cur


def _compute_depths(graph: ReachabilityGraph):
    """0/1 breadth-first search: entering a block with at least one
    unconditional goal costs 1, any other block costs 0."""
    succ: dict[int, list[int]] = {b.id: [] for b in graph.blocks}
    for u, v, _kind in graph.edges:
        succ[u].append(v)
    weight = [1 if b.unconditional else 0 for b in graph.blocks]
    dist = [UNREACHABLE_DEPTH] * len(graph.blocks)
    dist[graph.entry] = 0
    dq: deque[int] = deque([graph.entry])
    while dq:
        u = dq.popleft()
        du = dist[u]
        for v in succ[u]:
            nd = du + weight[v]
            if nd < dist[v]:
                dist[v] = nd
                if weight[v]:
                    dq.append(v)
                else:
                    dq.appendleft(v)
    for b in graph.blocks:
        b.depth = dist[b.id]
    for g in graph.table.goals:
        g.depth = dist[graph.goal_block[g.id]]


def build_graph(program: Program, table: GoalTable) -> ReachabilityGraph:
    """Build the reachability graph for a labeled program, assign each
    goal to its block, and fill in goal depths (mutates `table`)."""
    return _Builder(program, table).build()


# ---------------------------------------------------------------------------
# Ranking

# error sites first, then branch arms, loops, function entries
_KIND_PRIORITY = {
    "error-reach": 0,
    "then-branch": 1,
    "else-branch": 1,
    "loop-body": 2,
    "function-entry": 3,
}

STRATEGIES = ("deep-first", "kind-weighted")


def rank_goals(graph: ReachabilityGraph, strategy: str) -> GoalRanking:
    goals = graph.table.goals
    if strategy == "deep-first":
        order = sorted(goals, key=lambda g: (-g.depth, g.id))
    elif strategy == "kind-weighted":
        order = sorted(
            goals, key=lambda g: (_KIND_PRIORITY[g.kind], -g.depth, g.id)
        )
    else:
        raise ValueError(f"unknown ranking strategy {strategy!r}")
    return GoalRanking([g.id for g in order], strategy)


def dump_graph(graph: ReachabilityGraph) -> str:
    """Deterministic text form: entry, one goal line per goal, one edge
    line per edge (sorted). `always`/`on-failure` tells the depth oracle
    whether the goal counts toward block weight."""
    lines = [f"entry {graph.entry}"]
    for g in graph.table.goals:
        hit = "on-failure" if g.on_failure else "always"
        lines.append(
            f"goal {g.id} {graph.goal_block[g.id]} {g.kind} {hit} depth={g.depth}"
        )
    for u, v, kind in sorted(graph.edges):
        lines.append(f"edge {u} {v} {kind}")
    return "\n".join(lines) + "\n"
