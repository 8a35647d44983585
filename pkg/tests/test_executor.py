"""Interpreter semantics and the twin VM kernels."""

from array import array

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import minicgen._kernel_py as kernel_py
from minicgen import BudgetExhausted, TestCase
from minicgen.bytecode import compile_program, _s64
from minicgen.executor import Executor, enumerate_inputs, replay_suite
from minicgen.reachability import build_graph
from minicgen.vm import KERNEL_NAME

from conftest import build

try:
    import minicgen._kernel as kernel_c
except ImportError:
    kernel_c = None


def run_on(src, inputs, **kw):
    labeled, table = build(src)
    return Executor(labeled, table).run(TestCase(list(inputs)), **kw)


def test_inputs_answer_reads_in_dynamic_order():
    trace = run_on(
        """
        int main() {
          int n = input();
          int total = 0;
          int i = 0;
          while (i < n) {
            int v = input();
            total = total + v;
            i = i + 1;
          }
          return total;
        }
        """,
        [3, 10, 20, 30],
    )
    assert trace.exit_value == 60
    assert trace.inputs_consumed == 4
    # one site id per dynamic read: site 0 once, then site 1 three times
    assert trace.sites == [0, 1, 1, 1]


def test_exhausted_reads_return_zero():
    trace = run_on(
        "int main() { int a = input(); int b = input(); return a + b; }",
        [7],
    )
    assert trace.exit_value == 7
    assert trace.outcome == "input-exhausted"


def test_unused_values_do_not_flag_exhaustion():
    trace = run_on("int main() { int a = input(); return a; }", [1, 2, 3])
    assert trace.outcome == "normal-exit"


def test_halt_outcomes_beat_input_exhausted():
    trace = run_on(
        "int main() { int a = input(); int b = input(); if (a == b) { error(); } return 0; }",
        [],
    )
    # both reads exhausted into zeros, then the error fires
    assert trace.outcome == "error-reached"


def test_error_covers_its_goal_then_halts():
    trace = run_on(
        "int main() { int x = input(); if (x == 5) { error(); } return 9; }",
        [5],
    )
    assert trace.outcome == "error-reached"
    assert trace.covered == [0, 1, 2]
    assert trace.exit_value is None


def test_assert_failure_outcome():
    src = "int main() { int x = input(); assert(x < 10); return x; }"
    bad = run_on(src, [12])
    assert bad.outcome == "assertion-failure" and 1 in bad.covered
    ok = run_on(src, [3])
    assert ok.outcome == "normal-exit" and 1 not in ok.covered


def test_divide_by_zero_traps_with_location():
    trace = run_on(
        "int main() { int x = input(); int q = 10 / x; return q; }",
        [0],
    )
    assert trace.outcome == "trap"
    assert trace.trap_kind == "div-by-zero"
    assert trace.trap_loc is not None
    assert trace.covered == [0]  # entry covered before the trap


def test_step_limit():
    trace = run_on(
        "int main() { int i = 0; while (i < 1000000) { i = i + 1; } return i; }",
        [],
        step_limit=1000,
    )
    assert trace.outcome == "step-limit"


def test_covered_is_first_hit_order_without_duplicates():
    trace = run_on(
        """
        int main() {
          int i = 0;
          while (i < 3) {
            i = i + 1;
          }
          return i;
        }
        """,
        [],
    )
    assert trace.covered == [0, 1]


def test_max_depth_reflects_deepest_covered_goal():
    labeled, table = build(
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
    build_graph(labeled, table)  # annotates goal depths
    trace = Executor(labeled, table).run(TestCase([11]))
    assert trace.max_depth == 2


def test_call_frames_isolate_locals():
    trace = run_on(
        """
        int bump(int v) {
          v = v + 100;
          return v;
        }

        int main() {
          int v = 5;
          int r = bump(v);
          return r + v;
        }
        """,
        [],
    )
    assert trace.exit_value == 110


def test_wrapping_in_program_arithmetic():
    trace = run_on(
        "int main() { int x = input(); int y = x + 1; return y; }",
        [2**31 - 1],
    )
    assert trace.exit_value == -(2**31)


def test_unsigned_comparison_in_program():
    trace = run_on(
        "int main() { uint x = input(); if (x > 2147483648) { return 1; } return 0; }",
        [-1],  # pattern 0xFFFFFFFF, largest uint
    )
    assert trace.exit_value == 1


def test_max_runs_budget():
    labeled, table = build("int main() { return 0; }")
    ex = Executor(labeled, table)
    ex.max_runs = 2
    ex.run(TestCase([]))
    ex.run(TestCase([]))
    with pytest.raises(BudgetExhausted):
        ex.run(TestCase([]))
    assert ex.runs == 2


def test_test_ids_assigned_by_tracer_not_executor():
    tc = TestCase([1, 2])
    assert tc.id == -1


def test_replay_suite_attribution():
    labeled, table = build(
        "int main() { int x = input(); if (x > 0) { return 1; } return 0; }"
    )
    ex = Executor(labeled, table)
    a, b = TestCase([5]), TestCase([-5])
    a.id, b.id = 1, 2
    summary = replay_suite(ex, [a, b])
    assert summary.covered == {0, 1, 2}
    assert summary.first_covering == {0: 1, 1: 1, 2: 2}


def test_enumerate_inputs_small_domain():
    labeled, table = build(
        "int main() { int x = input(); if (x == 2) { return 1; } return 0; }"
    )
    ex = Executor(labeled, table)
    got = enumerate_inputs(ex, 1, [0, 1, 2])
    assert got == {0, 1, 2}
    assert enumerate_inputs(ex, 1, [0, 1]) == {0, 2}


# -- twin kernels ----------------------------------------------------------

def raw_run(kernel, code, inputs, step_limit=1_000_000):
    enc = array("q", [_s64(v & (2**64 - 1)) for v in inputs]) or array("q", [0])
    covered = array("q", [0] * max(code.n_goals, 1))
    sites = array("q", [0] * 256)
    seen = array("b", [0] * max(code.n_goals, 1))
    out = kernel.run_kernel(
        code.ops, code.a, code.b, code.c,
        code.entry_pc, code.main_frame,
        enc, len(inputs), step_limit,
        code.n_goals, code.locals_size, code.stack_size,
        covered, sites, seen,
    )
    return tuple(out), list(covered[: out[3]]), list(sites[: out[4]])


@pytest.mark.skipif(kernel_c is None, reason="compiled kernel not built")
def test_compiled_kernel_is_active_by_default():
    assert KERNEL_NAME == "compiled"


@pytest.mark.skipif(kernel_c is None, reason="compiled kernel not built")
@settings(deadline=None, max_examples=60)
@given(
    st.lists(st.integers(-(2**63), 2**63 - 1), min_size=0, max_size=6),
    st.sampled_from(
        [
            "p03_loop.mc",
            "p07_div.mc",
            "p08_unsigned.mc",
            "p10_loop_nest.mc",
            "p14_bits.mc",
            "p15_wide.mc",
            "g2_product.mc",
        ]
    ),
)
def test_kernels_agree(corpus_programs, inputs, name):
    _src, _prog, labeled, table = corpus_programs[name]
    code = compile_program(labeled, len(table))
    a = raw_run(kernel_py, code, inputs)
    b = raw_run(kernel_c, code, inputs)
    assert a == b
