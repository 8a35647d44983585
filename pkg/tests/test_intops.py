"""Arithmetic kernel semantics, checked against independent models."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from minicgen.intops import (
    EvalTrap,
    apply_binary,
    apply_unary,
    clamp_pattern,
    domain,
    from_value,
    to_signed,
    to_value,
    wrap,
)

u32 = st.integers(0, 2**32 - 1)
u64 = st.integers(0, 2**64 - 1)
s32 = st.integers(-(2**31), 2**31 - 1)
any_int = st.integers(-(2**80), 2**80)


def trunc_div(a: int, b: int) -> int:
    # Round-toward-zero division, phrased via floor division so it does
    # not share code with the implementation.
    q = a // b
    if q < 0 and q * b != a:
        q += 1
    return q


@given(any_int)
def test_wrap_is_mod_2w(v):
    assert wrap(v, 32) == v % 2**32
    assert wrap(v, 64) == v % 2**64


@given(u32)
def test_signed_round_trip(p):
    assert from_value(to_signed(p, 32), 32) == p


@given(s32)
def test_value_round_trip(v):
    assert to_value(from_value(v, 32), 32, True) == v


def test_domains():
    assert domain(32, True) == (-(2**31), 2**31 - 1)
    assert domain(32, False) == (0, 2**32 - 1)
    assert domain(64, True) == (-(2**63), 2**63 - 1)
    assert domain(64, False) == (0, 2**64 - 1)


@given(u32, u32, st.sampled_from(["+", "-", "*"]))
def test_wrapping_arithmetic_signed(a, b, op):
    sa, sb = to_signed(a, 32), to_signed(b, 32)
    exact = {"+": sa + sb, "-": sa - sb, "*": sa * sb}[op]
    assert apply_binary(op, a, b, 32, True) == exact % 2**32


@given(u64, u64)
def test_wrapping_add_64(a, b):
    assert apply_binary("+", a, b, 64, False) == (a + b) % 2**64


@given(s32, st.integers(-(2**31), 2**31 - 1).filter(lambda v: v != 0))
def test_division_truncates_toward_zero(a, b):
    pa, pb = from_value(a, 32), from_value(b, 32)
    q = to_signed(apply_binary("/", pa, pb, 32, True), 32)
    r = to_signed(apply_binary("%", pa, pb, 32, True), 32)
    # trunc_div overflows only for MIN / -1, where the quotient wraps
    assert q == to_signed(wrap(trunc_div(a, b), 32), 32)
    assert wrap(q * b + r, 32) == pa


def test_min_over_minus_one_wraps():
    pmin = from_value(-(2**31), 32)
    pneg1 = from_value(-1, 32)
    assert apply_binary("/", pmin, pneg1, 32, True) == pmin
    assert to_signed(apply_binary("%", pmin, pneg1, 32, True), 32) == 0


def test_division_by_zero_traps():
    with pytest.raises(EvalTrap):
        apply_binary("/", 5, 0, 32, True)
    with pytest.raises(EvalTrap):
        apply_binary("%", 5, 0, 32, False)


def test_hand_division_cases():
    cases = [(7, 2, 3, 1), (-7, 2, -3, -1), (7, -2, -3, 1), (-7, -2, 3, -1)]
    for a, b, q, r in cases:
        pa, pb = from_value(a, 32), from_value(b, 32)
        assert to_signed(apply_binary("/", pa, pb, 32, True), 32) == q
        assert to_signed(apply_binary("%", pa, pb, 32, True), 32) == r


@given(u32, st.integers(0, 2**32 - 1))
def test_shift_count_mod_width(a, s):
    assert apply_binary("<<", a, s, 32, False) == apply_binary("<<", a, s % 32, 32, False)
    assert apply_binary(">>", a, s, 32, False) == (a >> (s % 32))


@given(s32, st.integers(0, 31))
def test_arithmetic_right_shift(v, s):
    p = from_value(v, 32)
    assert to_signed(apply_binary(">>", p, s, 32, True), 32) == v >> s


@given(u32, u32)
def test_unsigned_comparison(a, b):
    assert apply_binary("<", a, b, 32, False) == (1 if a < b else 0)


@given(s32, s32)
def test_signed_comparison(a, b):
    pa, pb = from_value(a, 32), from_value(b, 32)
    assert apply_binary("<=", pa, pb, 32, True) == (1 if a <= b else 0)
    assert apply_binary("==", pa, pb, 32, True) == (1 if a == b else 0)


@given(u32, u32)
def test_logical_results_are_bits(a, b):
    assert apply_binary("&&", a, b, 32, False) == (1 if a and b else 0)
    assert apply_binary("||", a, b, 32, False) == (1 if a or b else 0)


@given(s32)
def test_unary_ops(v):
    p = from_value(v, 32)
    assert to_signed(apply_unary("-", p, 32), 32) == to_signed(wrap(-v, 32), 32)
    assert to_signed(apply_unary("~", p, 32), 32) == ~v
    assert apply_unary("!", p, 32) == (1 if v == 0 else 0)


@given(s32, s32, s32)
def test_clamp_pattern(v, a, b):
    lo, hi = min(a, b), max(a, b)
    got = to_signed(
        clamp_pattern(from_value(v, 32), from_value(lo, 32), from_value(hi, 32), 32, True),
        32,
    )
    assert got == min(max(v, lo), hi)
