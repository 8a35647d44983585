"""Fixed-width two's-complement arithmetic shared by every engine.

Values travel as unsigned bit patterns: Python ints in [0, 2**width).
The interpreter kernels, the symbolic term evaluator, and the constraint
solver all route through the same rules so their results agree bit for
bit:

* add/sub/mul wrap at the operand width,
* signed division and remainder truncate toward zero (the lone overflow,
  MIN / -1, wraps back to MIN),
* shift counts are taken modulo the width,
* comparisons and logical operators yield the 32-bit patterns 0 and 1.
"""

from __future__ import annotations

MASK32 = 0xFFFFFFFF
MASK64 = 0xFFFFFFFFFFFFFFFF


class EvalTrap(Exception):
    """Arithmetic trap (division or remainder by zero)."""

    def __init__(self, kind: str = "div-by-zero"):
        super().__init__(kind)
        self.kind = kind


def mask(width: int) -> int:
    return MASK64 if width == 64 else MASK32


def wrap(value: int, width: int) -> int:
    """Reduce an arbitrary Python int to its width-bit pattern."""
    return value & (MASK64 if width == 64 else MASK32)


def to_signed(pattern: int, width: int) -> int:
    """Interpret a bit pattern as a signed value."""
    sign_bit = 1 << (width - 1)
    if pattern & sign_bit:
        return pattern - (1 << width)
    return pattern


def domain(width: int, signed: bool) -> tuple[int, int]:
    """Representable [lo, hi] as ordinary Python ints."""
    if signed:
        return -(1 << (width - 1)), (1 << (width - 1)) - 1
    return 0, (1 << width) - 1


def from_value(value: int, width: int) -> int:
    """Encode a (possibly negative) Python int as a bit pattern."""
    return wrap(value, width)


def to_value(pattern: int, width: int, signed: bool) -> int:
    """Decode a bit pattern into the Python int the type denotes."""
    return to_signed(pattern, width) if signed else pattern


def _div_trunc(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


def apply_binary(op: str, a: int, b: int, width: int, signed: bool) -> int:
    """Evaluate a MiniC binary operator over bit patterns.

    `a` and `b` must already be canonical patterns of the given width.
    Comparison and logical results are 0/1. Raises EvalTrap on division
    or remainder by zero.
    """
    m = MASK64 if width == 64 else MASK32
    if op == "+":
        return (a + b) & m
    if op == "-":
        return (a - b) & m
    if op == "*":
        return (a * b) & m
    if op == "/" or op == "%":
        if b == 0:
            raise EvalTrap()
        if signed:
            sa, sb = to_signed(a, width), to_signed(b, width)
            q = _div_trunc(sa, sb)
            return (q & m) if op == "/" else ((sa - sb * q) & m)
        return (a // b) if op == "/" else (a % b)
    if op == "==":
        return 1 if a == b else 0
    if op == "!=":
        return 1 if a != b else 0
    if op in ("<", "<=", ">", ">="):
        if signed:
            a, b = to_signed(a, width), to_signed(b, width)
        if op == "<":
            return 1 if a < b else 0
        if op == "<=":
            return 1 if a <= b else 0
        if op == ">":
            return 1 if a > b else 0
        return 1 if a >= b else 0
    if op == "&&":
        return 1 if (a != 0 and b != 0) else 0
    if op == "||":
        return 1 if (a != 0 or b != 0) else 0
    if op == "&":
        return a & b
    if op == "|":
        return a | b
    if op == "^":
        return a ^ b
    if op == "<<":
        return (a << (b & (width - 1))) & m
    if op == ">>":
        s = b & (width - 1)
        if signed:
            return (to_signed(a, width) >> s) & m
        return a >> s
    raise ValueError(f"unknown binary operator {op!r}")


def apply_unary(op: str, a: int, width: int) -> int:
    m = MASK64 if width == 64 else MASK32
    if op == "-":
        return (-a) & m
    if op == "~":
        return a ^ m
    if op == "!":
        return 1 if a == 0 else 0
    raise ValueError(f"unknown unary operator {op!r}")


def clamp_pattern(x: int, lo: int, hi: int, width: int, signed: bool) -> int:
    """Clamp pattern x into [lo, hi] (patterns, compared per signedness)."""
    if signed:
        xs, los, his = to_signed(x, width), to_signed(lo, width), to_signed(hi, width)
        if xs < los:
            return lo
        if xs > his:
            return hi
        return x
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


COMPARISON_OPS = frozenset({"==", "!=", "<", "<=", ">", ">="})
LOGICAL_OPS = frozenset({"&&", "||"})
ARITH_OPS = frozenset({"+", "-", "*", "/", "%"})
BITWISE_OPS = frozenset({"&", "|", "^", "<<", ">>"})
BINARY_OPS = COMPARISON_OPS | LOGICAL_OPS | ARITH_OPS | BITWISE_OPS
