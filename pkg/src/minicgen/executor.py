"""Concrete execution of labeled programs: the ground truth every engine
and the acceptance oracle share.

A TestCase is an ordered value vector; value i answers the i-th dynamic
input read. Excess values are ignored; running out marks the trace
input-exhausted and the remaining reads yield 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .bytecode import (
    OUT_ASSERT,
    OUT_ERROR,
    OUT_INTERNAL,
    OUT_NORMAL,
    OUT_STEP,
    OUT_TRAP,
    compile_program,
)
from .frontend import Program
from .instrument import GoalTable
from .intops import to_signed
from .vm import run_code

DEFAULT_STEP_LIMIT = 1_000_000

ORIGINS = ("fuzzer", "selective", "bmc", "seed-phase", "corpus")


class BudgetExhausted(Exception):
    """Raised by run() once the executor's run allowance is used up."""


@dataclass
class TestCase:
    __test__ = False  # keep pytest from collecting this as a test class

    inputs: list[int]
    origin: str = "fuzzer"
    id: int = -1


@dataclass
class ExecutionTrace:
    covered: list[int]
    max_depth: int
    outcome: str
    goal_id: int | None = None
    trap_kind: str | None = None
    trap_loc: tuple[int, int] | None = None
    exit_value: int | None = None
    steps: int = 0
    inputs_consumed: int = 0
    sites: list[int] = field(default_factory=list)
    exhausted: bool = False

    @property
    def covered_set(self) -> frozenset[int]:
        return frozenset(self.covered)


@dataclass
class CoverageSummary:
    covered: set[int]
    first_covering: dict[int, int]
    outcomes: dict[int, str]


class Executor:
    """Compiles a labeled program once and runs test cases against it.

    `runs` counts every run() call; campaign budgets are measured in
    these executions.
    """

    def __init__(self, program: Program, table: GoalTable):
        self.program = program
        self.table = table
        self.code = compile_program(program, len(table))
        self.depths = [g.depth for g in table.goals]
        self.runs = 0
        self.max_runs: int | None = None

    def run(self, tc: TestCase, step_limit: int = DEFAULT_STEP_LIMIT) -> ExecutionTrace:
        if step_limit < 1:
            raise ValueError("step_limit must be >= 1")
        if self.max_runs is not None and self.runs >= self.max_runs:
            raise BudgetExhausted()
        self.runs += 1
        raw = run_code(self.code, tc.inputs, step_limit)
        if raw.outcome == OUT_INTERNAL:
            raise RuntimeError(
                f"interpreter invariant violated (detail={raw.detail}, "
                f"pc={raw.trap_pc})"
            )
        covered = raw.covered
        max_depth = 0
        for g in covered:
            d = self.depths[g]
            if 0 <= d > max_depth:
                max_depth = d
        trace = ExecutionTrace(
            covered=covered,
            max_depth=max_depth,
            outcome="normal-exit",
            steps=raw.steps,
            inputs_consumed=raw.consumed,
            sites=raw.sites,
            exhausted=raw.exhausted,
        )
        if raw.outcome == OUT_NORMAL:
            trace.exit_value = to_signed(raw.exit_s64 & 0xFFFFFFFF, 32)
            trace.outcome = "input-exhausted" if raw.exhausted else "normal-exit"
        elif raw.outcome == OUT_ASSERT:
            trace.outcome = "assertion-failure"
            trace.goal_id = raw.detail
        elif raw.outcome == OUT_ERROR:
            trace.outcome = "error-reached"
            trace.goal_id = raw.detail
        elif raw.outcome == OUT_TRAP:
            trace.outcome = "trap"
            trace.trap_kind = "div-by-zero"
            trace.trap_loc = self.code.loc_of(raw.trap_pc)
        elif raw.outcome == OUT_STEP:
            trace.outcome = "step-limit"
        return trace


def run(
    program: Program,
    table: GoalTable,
    tc: TestCase,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> ExecutionTrace:
    """One-shot convenience wrapper around Executor."""
    return Executor(program, table).run(tc, step_limit)


def replay_suite(
    executor: Executor, suite: list[TestCase], step_limit: int = DEFAULT_STEP_LIMIT
) -> CoverageSummary:
    """Replay a suite in order; per-goal attribution goes to the first
    test case that covers the goal."""
    covered: set[int] = set()
    first: dict[int, int] = {}
    outcomes: dict[int, str] = {}
    for tc in suite:
        trace = executor.run(tc, step_limit)
        outcomes[tc.id] = trace.outcome
        for g in trace.covered:
            if g not in covered:
                covered.add(g)
                first[g] = tc.id
    return CoverageSummary(covered=covered, first_covering=first, outcomes=outcomes)


def enumerate_inputs(
    executor: Executor,
    n_positions: int,
    values: list[int],
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> set[int]:
    """Brute-force oracle: run every tuple from values^n_positions and
    return the union of covered goals. Exponential; only sensible for
    tiny domains."""
    covered: set[int] = set()
    for combo in itertools.product(values, repeat=n_positions):
        trace = executor.run(TestCase(list(combo), origin="corpus"), step_limit)
        covered.update(trace.covered)
    return covered
