"""Path-condition solving: guard families, status honesty, soundness."""

from itertools import product

from hypothesis import given, settings
from hypothesis import strategies as st

from minicgen.intops import EvalTrap
from minicgen.solver import INCOMPLETE, SAT, UNSAT, PathCondition, solve
from minicgen.terms import const, eval_term, mk_bin, mk_clamp

W = 32


def var(idx):
    from minicgen.terms import TVar
    return TVar(W, True, idx, idx)


def c(v):
    return const(v, W, True)


def cmp(op, a, b):
    return mk_bin(op, a, b, W, True)


def holds(pc, env):
    for t, want in pc.conjuncts:
        try:
            p = eval_term(t, env)
        except EvalTrap:
            return False
        if (p != 0) != want:
            return False
    return True


def types(n):
    return {i: (W, True) for i in range(n)}


def test_equality_guard_pins_value():
    pc = PathCondition([(cmp("==", var(0), c(62710561)), True)])
    r = solve(pc, types(1))
    assert r.status == SAT
    assert r.assignment == {0: 62710561}
    assert r.probes <= 4


def test_square_guard():
    x = var(0)
    pc = PathCondition([(cmp("==", mk_bin("*", x, x, W, True), c(1522756)), True)])
    r = solve(pc, types(1))
    assert r.status == SAT
    assert r.assignment[0] in (1234, -1234)


def test_product_of_two_variables():
    x, y = var(0), var(1)
    pc = PathCondition([(cmp("==", mk_bin("*", x, y, W, True), c(1522756)), True)])
    r = solve(pc, types(2))
    assert r.status == SAT
    assert holds(pc, r.assignment)


def test_product_with_equality_side_constraint():
    x, y = var(0), var(1)
    pc = PathCondition(
        [
            (cmp("==", mk_bin("*", x, y, W, True), c(1522756)), True),
            (cmp("==", x, y), True),
        ]
    )
    r = solve(pc, types(2))
    assert r.status == SAT
    assert r.assignment[0] == r.assignment[1]
    assert abs(r.assignment[0]) == 1234


def test_affine_guard():
    x = var(0)
    lhs = mk_bin("-", mk_bin("*", c(5), x, W, True), c(3), W, True)
    pc = PathCondition([(cmp("==", lhs, c(12345672)), True)])
    r = solve(pc, types(1))
    assert r.status == SAT
    assert r.assignment == {0: 2469135}


def test_two_independent_pins():
    pc = PathCondition(
        [
            (cmp("==", var(0), c(8191)), True),
            (cmp("==", var(1), c(131071)), True),
        ]
    )
    r = solve(pc, types(2))
    assert r.status == SAT
    assert r.assignment == {0: 8191, 1: 131071}


def test_negated_conjunct():
    pc = PathCondition(
        [
            (cmp(">=", var(0), c(7)), True),
            (cmp("<=", var(0), c(8)), True),
            (cmp("==", var(0), c(7)), False),
        ]
    )
    r = solve(pc, types(1))
    assert r.status == SAT
    assert r.assignment == {0: 8}


def test_clamp_term_refines_through():
    x = var(0)
    pc = PathCondition([(cmp("==", mk_clamp(x, 0, 100, W, True), c(42)), True)])
    r = solve(pc, types(1))
    assert r.status == SAT
    assert r.assignment == {0: 42}


def test_division_term():
    x = var(0)
    pc = PathCondition(
        [
            (cmp("==", mk_bin("/", x, c(2), W, True), c(5)), True),
            (cmp(">", x, c(0)), True),
        ]
    )
    r = solve(pc, types(1))
    assert r.status == SAT
    assert r.assignment[0] in (10, 11)


def test_contradiction_is_unsat_without_probing():
    pc = PathCondition(
        [
            (cmp(">", var(0), c(5)), True),
            (cmp("<", var(0), c(3)), True),
        ]
    )
    r = solve(pc, types(1))
    assert r.status == UNSAT
    assert r.probes == 0


def test_unsat_proven_on_enumerable_domain():
    x = var(0)
    pc = PathCondition([(cmp("==", mk_bin("*", x, x, W, True), c(3)), True)])
    r = solve(pc, types(1), initial_domains={0: (-10, 10)})
    assert r.status == UNSAT


def test_incomplete_on_full_domain():
    # no 32-bit square wraps to 3, but proving that would need modular
    # reasoning; the honest verdict at this width is "incomplete"
    x = var(0)
    pc = PathCondition([(cmp("==", mk_bin("*", x, x, W, True), c(3)), True)])
    r = solve(pc, types(1))
    assert r.status == INCOMPLETE


def test_probe_budget_is_respected():
    x, y = var(0), var(1)
    pc = PathCondition(
        [(cmp("==", mk_bin("^", x, y, W, True), c(123456789)), True)]
    )
    r = solve(pc, types(2), probe_budget=50)
    assert r.status in (SAT, INCOMPLETE)
    assert r.probes <= 50


def test_empty_initial_domain_intersection():
    pc = PathCondition([(cmp(">", var(0), c(0)), True)])
    r = solve(pc, types(1), initial_domains={0: (5, 2)})
    assert r.status == UNSAT


def test_assignment_respects_initial_domain():
    pc = PathCondition([(cmp(">", var(0), c(-100)), True)])
    r = solve(pc, types(1), initial_domains={0: (-8, 8)})
    assert r.status == SAT
    assert -8 <= r.assignment[0] <= 8


def test_constant_only_conditions():
    assert solve(PathCondition([(c(1), True)]), {}).status == SAT
    assert solve(PathCondition([(c(0), True)]), {}).status == UNSAT


def test_variables_listing_and_dump():
    x, y = var(0), var(1)
    pc = PathCondition(
        [
            (cmp("<", y, c(3)), True),
            (cmp(">", x, c(0)), False),
        ]
    )
    assert pc.variables() == [0, 1]
    lines = pc.dump().splitlines()
    assert lines[0].startswith("assume ") and lines[1].startswith("refute ")


# -- randomized honesty ------------------------------------------------------

LO, HI = -20, 20


def lin_terms(nvars):
    x = var(0)
    opts = [
        x,
        mk_bin("+", x, c(7), W, True),
        mk_bin("*", x, c(3), W, True),
        mk_bin("*", x, x, W, True),
    ]
    if nvars == 2:
        y = var(1)
        opts += [mk_bin("*", x, y, W, True), mk_bin("-", x, y, W, True), y]
    return opts


@settings(deadline=None, max_examples=50)
@given(st.data())
def test_verdicts_match_brute_force_on_small_domains(data):
    nvars = data.draw(st.integers(1, 2))
    n = data.draw(st.integers(1, 3))
    pc = PathCondition(
        [
            (
                cmp(
                    data.draw(st.sampled_from(["==", "!=", "<", "<=", ">", ">="])),
                    data.draw(st.sampled_from(lin_terms(nvars))),
                    c(data.draw(st.integers(LO * 2, HI * 2))),
                ),
                data.draw(st.booleans()),
            )
            for _ in range(n)
        ]
    )
    doms = {i: (LO, HI) for i in range(nvars)}
    r = solve(pc, types(nvars), initial_domains=doms)
    assert r.status in (SAT, UNSAT)  # enumerable: never gives up
    truth = any(
        holds(pc, dict(zip(range(nvars), vals)))
        for vals in product(range(LO, HI + 1), repeat=nvars)
    )
    if truth:
        assert r.status == SAT
        assert holds(pc, r.assignment)
        assert all(LO <= v <= HI for v in r.assignment.values())
    else:
        assert r.status == UNSAT
