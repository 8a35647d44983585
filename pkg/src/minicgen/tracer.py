"""Coverage accounting, test impact scoring, and the live seed store.

The tracer is the shared ledger between engines: every execution is
recorded here, coverage deltas are reported immediately, and the seed
store keeps the best test cases for further mutation. Impact compares
lexicographically: more solely-covered labels first, then deeper
coverage, then lower test id, so scores from the same campaign always
order totally and deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .executor import ExecutionTrace, TestCase
from .instrument import GoalTable
from .reachability import GoalRanking, ReachabilityGraph

COVERING_CAP = 8
SEED_CAPACITY = 64


@dataclass(frozen=True)
class ImpactScore:
    unique_labels: int
    max_depth: int
    test_id: int

    def key(self) -> tuple[int, int, int]:
        return (-self.unique_labels, -self.max_depth, self.test_id)


@dataclass
class Seed:
    tc: TestCase
    trace: ExecutionTrace | None
    impact: ImpactScore
    incomplete_for: int | None = None  # goal this seed approaches but misses


@dataclass
class SeedStore:
    capacity: int = SEED_CAPACITY
    generation: int = 0
    seeds: list[Seed] = field(default_factory=list)

    def ids(self) -> list[int]:
        return [s.tc.id for s in self.seeds]


@dataclass
class CoverageMap:
    n_goals: int
    covered: list[bool] = field(default_factory=list)
    first_test: list[int] = field(default_factory=list)
    covering_tests: list[list[int]] = field(default_factory=list)

    def __post_init__(self):
        if not self.covered:
            self.covered = [False] * self.n_goals
            self.first_test = [-1] * self.n_goals
            self.covering_tests = [[] for _ in range(self.n_goals)]

    def count(self) -> int:
        return sum(self.covered)


@dataclass
class _Recorded:
    tc: TestCase
    trace: ExecutionTrace
    delta: tuple[int, ...]


class Tracer:
    def __init__(self, table: GoalTable, graph: ReachabilityGraph, capacity: int = SEED_CAPACITY):
        self.table = table
        self.graph = graph
        self.coverage = CoverageMap(len(table))
        self.tests: dict[int, _Recorded] = {}
        self.store = SeedStore(capacity=capacity)
        self._next_id = 0
        self._claimed: set[int] = set()
        self.bmc_statuses: dict[int, str] = {}

    # recording

    def record(self, tc: TestCase, trace: ExecutionTrace) -> list[int]:
        """Book one execution; assigns the test id on first sight and
        returns the goals this run covered for the first time."""
        if tc.id < 0:
            tc.id = self._next_id
            self._next_id += 1
        elif tc.id >= self._next_id:
            self._next_id = tc.id + 1
        delta = []
        cov = self.coverage
        for gid in sorted(trace.covered_set):
            if not cov.covered[gid]:
                cov.covered[gid] = True
                cov.first_test[gid] = tc.id
                delta.append(gid)
            lst = cov.covering_tests[gid]
            if len(lst) < COVERING_CAP and tc.id not in lst:
                lst.append(tc.id)
        if tc.id not in self.tests:
            self.tests[tc.id] = _Recorded(tc, trace, tuple(delta))
        return delta

    def all_covered(self) -> bool:
        return self.coverage.count() == len(self.table)

    # impact

    def impact(self, test_id: int) -> ImpactScore:
        rec = self.tests[test_id]
        unique = 0
        for gid in rec.trace.covered_set:
            lst = self.coverage.covering_tests[gid]
            if len(lst) == 1 and lst[0] == test_id:
                unique += 1
        return ImpactScore(unique, max(rec.trace.max_depth, 0), test_id)

    def select_seeds(self, test_ids, n: int) -> list[Seed]:
        scored = [self.impact(tid) for tid in dict.fromkeys(test_ids)]
        scored.sort(key=ImpactScore.key)
        out = []
        for sc in scored[:n]:
            rec = self.tests[sc.test_id]
            out.append(Seed(rec.tc, rec.trace, sc))
        return out

    # seed store

    def maybe_promote(self, tc: TestCase, trace: ExecutionTrace) -> bool:
        """Admit the test into the store if there is room or it strictly
        beats the current weakest seed. Stored scores are refreshed
        against the present coverage before the comparison."""
        if tc.id < 0 or tc.id not in self.tests:
            raise ValueError("test must be recorded before promotion")
        store = self.store
        for s in store.seeds:
            s.impact = self.impact(s.tc.id)
        store.seeds.sort(key=lambda s: s.impact.key())
        if any(s.tc.id == tc.id for s in store.seeds):
            return False
        cand = Seed(tc, trace, self.impact(tc.id))
        if len(store.seeds) < store.capacity:
            store.seeds.append(cand)
            store.seeds.sort(key=lambda s: s.impact.key())
            store.generation += 1
            return True
        worst = store.seeds[-1]
        if cand.impact.key() < worst.impact.key():
            store.seeds[-1] = cand
            store.seeds.sort(key=lambda s: s.impact.key())
            store.generation += 1
            return True
        return False

    # goal selection for the bounded engine

    def next_goal_for_bmc(self, ranking: GoalRanking) -> int | None:
        """Hand out the best uncovered goal not yet attempted. A goal is
        claimed at most once; completed attempts are never retried since
        the engine is deterministic."""
        for gid in ranking.order:
            if self.coverage.covered[gid] or gid in self._claimed:
                continue
            self._claimed.add(gid)
            return gid
        return None

    def mark_bmc_result(self, goal_id: int, status: str) -> None:
        self.bmc_statuses[goal_id] = status

    def promote_incomplete_seed(self, target_goal: int) -> Seed | None:
        """Best stepping stone toward an unreached goal: the first test
        that covered the deepest covered goal lying on some forward path
        from the entry to the target's block."""
        target_block = self.graph.block_of(target_goal)
        fwd = self._forward_from_entry()
        rev = self._backward_from(target_block)
        on_path = fwd & rev
        best: tuple[int, int] | None = None  # (depth, goal id)
        for b in sorted(on_path):
            for gid in self.graph.blocks[b].goal_ids:
                if gid == target_goal or not self.coverage.covered[gid]:
                    continue
                d = self.table.depth_of(gid)
                if best is None or (d, -gid) > (best[0], -best[1]):
                    best = (d, gid)
        if best is None:
            return None
        tid = self.coverage.first_test[best[1]]
        if tid < 0 or tid not in self.tests:
            return None
        rec = self.tests[tid]
        return Seed(rec.tc, rec.trace, self.impact(tid), incomplete_for=target_goal)

    def _forward_from_entry(self) -> set[int]:
        seen = {self.graph.entry}
        work = [self.graph.entry]
        succ: dict[int, list[int]] = {}
        for u, v, _ in self.graph.edges:
            succ.setdefault(u, []).append(v)
        while work:
            u = work.pop()
            for v in succ.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    work.append(v)
        return seen

    def _backward_from(self, block: int) -> set[int]:
        pred: dict[int, list[int]] = {}
        for u, v, _ in self.graph.edges:
            pred.setdefault(v, []).append(u)
        seen = {block}
        work = [block]
        while work:
            u = work.pop()
            for v in pred.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    work.append(v)
        return seen

    # reporting

    def coverage_report(self) -> str:
        cov = self.coverage
        lines = [f"covered {cov.count()}/{len(self.table)}"]
        for g in self.table.goals:
            first = cov.first_test[g.id]
            lines.append(
                f"goal {g.id} kind={g.kind} depth={g.depth} "
                f"covered={'yes' if cov.covered[g.id] else 'no'} "
                f"first={first if first >= 0 else '-'}"
            )
        lines.append(f"seeds generation={self.store.generation} size={len(self.store.seeds)}")
        for s in self.store.seeds:
            lines.append(
                f"seed {s.tc.id} unique={s.impact.unique_labels} "
                f"depth={s.impact.max_depth} inputs={len(s.tc.inputs)}"
            )
        return "\n".join(lines) + "\n"
