"""Two-phase campaign driver coordinating the three test generators.

Phase 1 fuzzes a lightened copy of the program (bounded loops, clamped
inputs) purely to harvest seeds; its bookkeeping is kept apart so the
cheap coverage there never counts as campaign coverage. Phase 2 re-runs
the harvested seeds on the original program, recomputes their impact,
and alternates fuzzer, bounded engine, and selective generator rounds
until every goal in the property's universe is covered or the execution
budget runs out. The budget is a hard count of interpreter runs, shared
by all engines including witness validation replays.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .bmc import (
    REACH_WITNESS,
    STRATEGIES,
    BmcConfig,
    BmcEngine,
)
from .executor import (
    DEFAULT_STEP_LIMIT,
    BudgetExhausted,
    ExecutionTrace,
    Executor,
    TestCase,
)
from .frontend import Program
from .fuzzing import fuzz_round, selective_generate
from .instrument import (
    KIND_ERROR,
    GoalTable,
    infer_input_constraints,
    inject_labels,
    lighten,
)
from .reachability import GoalRanking, ReachabilityGraph, build_graph, rank_goals
from .tracer import Seed, SeedStore, Tracer

PROPERTY_BRANCHES = "coverage-branches"
PROPERTY_ERROR = "coverage-error"
PROPERTIES = (PROPERTY_BRANCHES, PROPERTY_ERROR)

DEFAULT_BUDGET_EXECS = 10_000
DEFAULT_SEED_FRACTION = 0.1
DEFAULT_LOOP_BOUND = 2
DEFAULT_RANGE = (-1024, 1024)
DEFAULT_ROUND_EXECS = 200


@dataclass
class EngineSplit:
    fuzzer: float = 0.5
    bmc: float = 0.4
    selective: float = 0.1


@dataclass
class CampaignConfig:
    rng_seed: int
    budget_execs: int = DEFAULT_BUDGET_EXECS
    budget_secs: float | None = None
    seed_phase_fraction: float = DEFAULT_SEED_FRACTION
    split: EngineSplit = field(default_factory=EngineSplit)
    goal_strategy: str = "kind-weighted"
    bmc: BmcConfig = field(default_factory=BmcConfig)
    loop_bound: int = DEFAULT_LOOP_BOUND
    default_range: tuple[int, int] = DEFAULT_RANGE
    # optional extension: restricts every generator, including the
    # solver, to inputs within this closed interval
    input_domain: tuple[int, int] | None = None
    round_execs: int = DEFAULT_ROUND_EXECS
    step_limit: int = DEFAULT_STEP_LIMIT
    seed_capacity: int = 64
    fuzzer_only: bool = False
    property_kind: str = PROPERTY_BRANCHES

    def validate(self) -> None:
        if self.budget_execs < 1:
            raise ValueError("budget_execs must be positive")
        if not 0.0 < self.seed_phase_fraction < 1.0:
            raise ValueError("seed_phase_fraction must lie in (0, 1)")
        total = self.split.fuzzer + self.split.bmc + self.split.selective
        if abs(total - 1.0) > 1e-9:
            raise ValueError("engine split fractions must sum to 1")
        if min(self.split.fuzzer, self.split.bmc, self.split.selective) < 0:
            raise ValueError("engine split fractions must be non-negative")
        if self.bmc.strategy not in STRATEGIES:
            raise ValueError(f"unknown bmc strategy {self.bmc.strategy!r}")
        if self.property_kind not in PROPERTIES:
            raise ValueError(f"unknown property {self.property_kind!r}")
        if self.loop_bound < 1:
            raise ValueError("loop_bound must be >= 1")
        if self.default_range[0] > self.default_range[1]:
            raise ValueError("default_range is empty")
        if self.input_domain and self.input_domain[0] > self.input_domain[1]:
            raise ValueError("input_domain is empty")

    def effective_split(self) -> EngineSplit:
        if self.fuzzer_only:
            return EngineSplit(1.0, 0.0, 0.0)
        return self.split


@dataclass
class SuiteEntry:
    tc: TestCase
    covered: tuple[int, ...]  # every goal this test covers


@dataclass
class CampaignResult:
    program: Program
    table: GoalTable
    graph: ReachabilityGraph
    suite: list[SuiteEntry]
    covered: set[int]
    universe: set[int]
    execs_used: int
    log: list[str]
    seeds: SeedStore
    tracer: Tracer
    hard_errors: int
    wall_secs: float

    @property
    def coverage(self) -> float:
        if not self.universe:
            return 1.0
        return len(self.covered & self.universe) / len(self.universe)


class _Clock:
    def __init__(self, budget_secs: float | None):
        self.t0 = time.monotonic()
        self.budget = budget_secs

    def expired(self) -> bool:
        return self.budget is not None and time.monotonic() - self.t0 >= self.budget

    def elapsed(self) -> float:
        return time.monotonic() - self.t0


def _rng(cfg: CampaignConfig, stream: str) -> random.Random:
    return random.Random(f"{cfg.rng_seed}:{stream}")


def _zero_case(program: Program) -> TestCase:
    return TestCase([0] * max(len(program.input_sites), 1), origin="fuzzer")


class Campaign:
    """One full run over a single program. Use run_campaign() unless
    tests need to poke at the phases separately."""

    def __init__(self, program: Program, cfg: CampaignConfig):
        cfg.validate()
        self.cfg = cfg
        self.labeled, self.table = inject_labels(program)
        self.graph = build_graph(self.labeled, self.table)
        self.ranking = rank_goals(self.graph, cfg.goal_strategy)
        self.constraints = infer_input_constraints(program)
        if cfg.property_kind == PROPERTY_ERROR:
            error_goals = [g.id for g in self.table.goals if g.kind == KIND_ERROR]
            self.universe = set(error_goals)
            self.bmc_ranking = GoalRanking(
                [g for g in self.ranking.order if g in self.universe],
                self.ranking.strategy,
            )
        else:
            self.universe = {g.id for g in self.table.goals}
            self.bmc_ranking = self.ranking
        self.log: list[str] = []
        self.hard_errors = 0
        self.clock = _Clock(cfg.budget_secs)
        self._phase1_runs = 0

    # helpers

    def _log(self, phase: int, engine: str, execs: int, tracer: Tracer) -> None:
        self.log.append(
            f"phase={phase} engine={engine} execs={execs} "
            f"covered={tracer.coverage.count()}/{len(self.table)}"
        )

    def _done(self, tracer: Tracer) -> bool:
        if self.clock.expired():
            return True
        return all(tracer.coverage.covered[g] for g in self.universe)

    # phase 1: seed harvesting on the lightened program

    def seed_generation_phase(self) -> SeedStore:
        cfg = self.cfg
        split = cfg.effective_split()
        budget = int(cfg.budget_execs * cfg.seed_phase_fraction)
        store = SeedStore(capacity=cfg.seed_capacity)
        if budget < 1:
            self._phase1_runs = 0
            return store
        light = lighten(self.labeled, cfg.loop_bound, cfg.default_range)
        ex = Executor(light, self.table)
        ex.max_runs = budget
        tracer = Tracer(self.table, self.graph, capacity=cfg.seed_capacity)
        rng_fuzz = _rng(cfg, "p1:fuzz")
        rng_sel = _rng(cfg, "p1:sel")
        try:
            boot = _zero_case(light)
            tracer.record(boot, ex.run(boot, cfg.step_limit))
            tracer.maybe_promote(boot, tracer.tests[boot.id].trace)

            sel_budget = int(budget * split.selective)
            for _ in range(sel_budget):
                tc = self._selective(rng_sel, light)
                trace = ex.run(tc, cfg.step_limit)
                if tracer.record(tc, trace):
                    tracer.maybe_promote(tc, trace)
            self._log(1, "selective", ex.runs, tracer)

            fuzz_budget = int(budget * split.fuzzer)
            self._fuzz_chunks(ex, tracer, fuzz_budget, rng_fuzz, phase=1)

            if split.bmc > 0:
                engine = BmcEngine(light, self.table, ex, cfg.bmc, cfg.input_domain)
                self._bmc_goals(engine, ex, tracer, phase=1)
                self.hard_errors += engine.hard_errors
        except BudgetExhausted:
            pass
        self._phase1_runs = ex.runs
        seeds = tracer.select_seeds(sorted(tracer.tests), cfg.seed_capacity)
        store.seeds = seeds
        store.generation = tracer.store.generation
        self._log(1, "seeds", ex.runs, tracer)
        return store

    def _selective(self, rng: random.Random, program: Program) -> TestCase:
        return selective_generate(
            len(program.input_sites),
            self.constraints,
            rng,
            program.input_sites,
            self.cfg.input_domain,
        )

    def _fuzz_chunks(
        self,
        ex: Executor,
        tracer: Tracer,
        budget: int,
        rng: random.Random,
        phase: int,
        extra_seeds: list[Seed] | None = None,
    ) -> None:
        left = budget
        while left > 0:
            chunk = min(left, self.cfg.round_execs)
            left -= chunk
            corpus = list(tracer.store.seeds)
            if extra_seeds:
                have = {s.tc.id for s in corpus}
                corpus.extend(s for s in extra_seeds if s.tc.id not in have)
            if not corpus:
                boot = _zero_case(ex.program)
                trace = ex.run(boot, self.cfg.step_limit)
                tracer.record(boot, trace)
                tracer.maybe_promote(boot, trace)
                corpus = list(tracer.store.seeds)
                chunk -= 1
            gains = fuzz_round(
                ex, corpus, chunk, tracer, rng, self.constraints, self.cfg.input_domain
            )
            for tc, trace in gains:
                tracer.maybe_promote(tc, trace)
            self._log(phase, "fuzzer", ex.runs, tracer)
            if self._done(tracer) and phase == 2:
                return

    def _bmc_goals(
        self,
        engine: BmcEngine,
        ex: Executor,
        tracer: Tracer,
        phase: int,
        incomplete_out: list[Seed] | None = None,
        max_goals: int | None = None,
    ) -> None:
        ranking = self.bmc_ranking
        attempted = 0
        while max_goals is None or attempted < max_goals:
            gid = tracer.next_goal_for_bmc(ranking)
            if gid is None:
                break
            attempted += 1
            if not engine.allows(gid):
                tracer.mark_bmc_result(gid, "skipped")
                continue
            res = engine.reach_goal(gid)
            tracer.mark_bmc_result(gid, res.status)
            if res.status == REACH_WITNESS:
                w = res.witness
                tracer.record(w.testcase, w.trace)
                tracer.maybe_promote(w.testcase, w.trace)
            elif incomplete_out is not None:
                stone = tracer.promote_incomplete_seed(gid)
                if stone is not None and all(
                    s.tc.id != stone.tc.id for s in incomplete_out
                ):
                    incomplete_out.append(stone)
            if self._done(tracer) and phase == 2:
                break
        if attempted:
            self._log(phase, "bmc", ex.runs, tracer)

    # phase 2: reachability on the original program

    def reachability_phase(self, seeds: SeedStore) -> tuple[Tracer, Executor]:
        cfg = self.cfg
        split = cfg.effective_split()
        ex = Executor(self.labeled, self.table)
        ex.max_runs = cfg.budget_execs - self._phase1_runs
        tracer = Tracer(self.table, self.graph, capacity=cfg.seed_capacity)
        rng_fuzz = _rng(cfg, "p2:fuzz")
        rng_sel = _rng(cfg, "p2:sel")
        engine = (
            BmcEngine(self.labeled, self.table, ex, cfg.bmc, cfg.input_domain)
            if split.bmc > 0
            else None
        )
        incomplete: list[Seed] = []
        try:
            # seeds survive the phase change regardless of their phase-1
            # outcome; impact is recomputed against original coverage
            for seed in seeds.seeds:
                tc = TestCase(list(seed.tc.inputs), origin="seed-phase")
                trace = ex.run(tc, cfg.step_limit)
                tracer.record(tc, trace)
                tracer.maybe_promote(tc, trace)
            self._log(2, "seeds", ex.runs, tracer)

            while not self._done(tracer) and ex.runs < ex.max_runs:
                round_left = min(cfg.round_execs, ex.max_runs - ex.runs)
                fuzz_chunk = int(round(round_left * split.fuzzer))
                sel_chunk = int(round(round_left * split.selective))
                if fuzz_chunk == 0 and sel_chunk == 0:
                    fuzz_chunk = round_left  # tiny final round: spend it fuzzing
                self._fuzz_chunks(
                    ex, tracer, fuzz_chunk, rng_fuzz, phase=2, extra_seeds=incomplete
                )
                if self._done(tracer):
                    break
                if engine is not None:
                    self._bmc_goals(
                        engine, ex, tracer, phase=2, incomplete_out=incomplete
                    )
                    if self._done(tracer):
                        break
                for _ in range(sel_chunk):
                    tc = self._selective(rng_sel, self.labeled)
                    trace = ex.run(tc, cfg.step_limit)
                    if tracer.record(tc, trace):
                        tracer.maybe_promote(tc, trace)
                if sel_chunk:
                    self._log(2, "selective", ex.runs, tracer)
        except BudgetExhausted:
            pass
        if engine is not None:
            self.hard_errors += engine.hard_errors
        return tracer, ex

    def minimize_suite(self, tracer: Tracer) -> list[SuiteEntry]:
        """Greedy cover: scan coverage-increasing tests in impact order,
        keeping each one that still contributes an uncovered goal."""
        target = {
            g for g in self.universe if tracer.coverage.covered[g]
        }
        candidates = [tid for tid, rec in sorted(tracer.tests.items()) if rec.delta]
        scored = sorted((tracer.impact(tid) for tid in candidates), key=lambda s: s.key())
        suite: list[SuiteEntry] = []
        got: set[int] = set()
        for sc in scored:
            rec = tracer.tests[sc.test_id]
            contribution = (rec.trace.covered_set & target) - got
            if not contribution:
                continue
            got |= contribution
            suite.append(SuiteEntry(rec.tc, tuple(sorted(rec.trace.covered_set))))
            if got == target:
                break
        return suite

    def run(self) -> CampaignResult:
        seeds = self.seed_generation_phase()
        tracer, ex = self.reachability_phase(seeds)
        suite = self.minimize_suite(tracer)
        covered = {g.id for g in self.table.goals if tracer.coverage.covered[g.id]}
        return CampaignResult(
            program=self.labeled,
            table=self.table,
            graph=self.graph,
            suite=suite,
            covered=covered,
            universe=self.universe,
            execs_used=self._phase1_runs + ex.runs,
            log=self.log,
            seeds=tracer.store,
            tracer=tracer,
            hard_errors=self.hard_errors,
            wall_secs=self.clock.elapsed(),
        )


def run_campaign(program: Program, cfg: CampaignConfig) -> CampaignResult:
    return Campaign(program, cfg).run()
