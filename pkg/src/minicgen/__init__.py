"""Hybrid test generation for MiniC programs.

The pipeline: parse a program, inject coverage goal labels, then run a
two-phase campaign in which a mutation fuzzer, a selective input
generator, and a bounded symbolic executor feed one shared coverage
tracer and seed store. Campaign output is a minimized test suite in an
XML exchange format plus a coverage report.
"""

from .bmc import BmcConfig, BmcEngine, ReachResult, Witness, dump_paths, unroll
from .errors import MiniCError, SyntaxErrorMC, TypeErrorMC
from .executor import (
    BudgetExhausted,
    ExecutionTrace,
    Executor,
    TestCase,
    enumerate_inputs,
    replay_suite,
)
from .frontend import Program, parse, pretty
from .fuzzing import (
    MUTATION_OPS,
    fuzz_round,
    mutate,
    schedule_energy,
    selective_generate,
)
from .instrument import (
    GoalLabel,
    GoalTable,
    InputConstraints,
    infer_input_constraints,
    inject_labels,
    lighten,
)
from .orchestrator import (
    PROPERTY_BRANCHES,
    PROPERTY_ERROR,
    CampaignConfig,
    CampaignResult,
    EngineSplit,
    run_campaign,
)
from .reachability import ReachabilityGraph, build_graph, dump_graph, rank_goals
from .solver import PathCondition, SolveResult, propagate, solve
from .suiteio import parse_property, read_suite, write_suite
from .tracer import CoverageMap, ImpactScore, Seed, SeedStore, Tracer

__version__ = "0.1.0"

__all__ = [
    "BmcConfig",
    "BmcEngine",
    "BudgetExhausted",
    "CampaignConfig",
    "CampaignResult",
    "CoverageMap",
    "EngineSplit",
    "ExecutionTrace",
    "Executor",
    "GoalLabel",
    "GoalTable",
    "ImpactScore",
    "InputConstraints",
    "MUTATION_OPS",
    "MiniCError",
    "PROPERTY_BRANCHES",
    "PROPERTY_ERROR",
    "PathCondition",
    "Program",
    "ReachResult",
    "ReachabilityGraph",
    "Seed",
    "SeedStore",
    "SolveResult",
    "SyntaxErrorMC",
    "TestCase",
    "Tracer",
    "TypeErrorMC",
    "Witness",
    "build_graph",
    "dump_graph",
    "dump_paths",
    "enumerate_inputs",
    "fuzz_round",
    "infer_input_constraints",
    "inject_labels",
    "lighten",
    "mutate",
    "parse",
    "parse_property",
    "pretty",
    "propagate",
    "rank_goals",
    "read_suite",
    "replay_suite",
    "run_campaign",
    "schedule_energy",
    "selective_generate",
    "solve",
    "unroll",
    "write_suite",
]
