"""Symbolic terms over input variables, in the program's operator set.

A term is a constant, an input variable (one per dynamic input read
along a path), or an operator application at a fixed width. Evaluation
uses the shared wrapping arithmetic, so a satisfying assignment found
symbolically is exactly what the concrete interpreter computes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intops import EvalTrap, apply_binary, apply_unary, from_value, to_value


@dataclass(frozen=True)
class Term:
    width: int
    signed: bool


@dataclass(frozen=True)
class TConst(Term):
    value: int  # canonical value-domain int for (width, signed)


@dataclass(frozen=True)
class TVar(Term):
    index: int  # dynamic read index along the path
    site: int   # static input site


@dataclass(frozen=True)
class TUn(Term):
    op: str
    a: Term


@dataclass(frozen=True)
class TBin(Term):
    op: str
    a: Term
    b: Term


@dataclass(frozen=True)
class TClamp(Term):
    a: Term
    lo: int
    hi: int


def const(value: int, width: int, signed: bool) -> TConst:
    return TConst(width, signed, to_value(from_value(value, width), width, signed))


def mk_un(op: str, a: Term, width: int, signed: bool) -> Term:
    if isinstance(a, TConst):
        p = apply_unary(op, from_value(a.value, a.width), a.width)
        w, s = (32, True) if op == "!" else (width, signed)
        return TConst(w, s, to_value(p, w, s))
    return TUn(width, signed, op, a)


def mk_bin(op: str, a: Term, b: Term, width: int, signed: bool) -> Term:
    if isinstance(a, TConst) and isinstance(b, TConst):
        try:
            p = apply_binary(
                op,
                from_value(a.value, a.width),
                from_value(b.value, b.width),
                a.width,
                a.signed,
            )
        except EvalTrap:
            return TBin(width, signed, op, a, b)  # guard conjunct kills the path
        return TConst(width, signed, to_value(p, width, signed))
    return TBin(width, signed, op, a, b)


def mk_clamp(a: Term, lo: int, hi: int, width: int, signed: bool) -> Term:
    if isinstance(a, TConst):
        return TConst(width, signed, min(max(a.value, lo), hi))
    return TClamp(width, signed, a, lo, hi)


def eval_term(t: Term, env: dict[int, int]) -> int:
    """Evaluate to a bit pattern under an assignment of value-domain ints
    to variable indices. Raises EvalTrap on division by zero and KeyError
    on an unassigned variable."""
    if isinstance(t, TConst):
        return from_value(t.value, t.width)
    if isinstance(t, TVar):
        return from_value(env[t.index], t.width)
    if isinstance(t, TUn):
        return apply_unary(t.op, eval_term(t.a, env), t.a.width)
    if isinstance(t, TBin):
        pa = eval_term(t.a, env)
        pb = eval_term(t.b, env)
        return apply_binary(t.op, pa, pb, t.a.width, t.a.signed)
    if isinstance(t, TClamp):
        p = eval_term(t.a, env)
        v = to_value(p, t.width, t.signed)
        return from_value(min(max(v, t.lo), t.hi), t.width)
    raise AssertionError(f"unhandled term {type(t).__name__}")


def term_vars(t: Term, out: set[int] | None = None) -> set[int]:
    if out is None:
        out = set()
    if isinstance(t, TVar):
        out.add(t.index)
    elif isinstance(t, TUn):
        term_vars(t.a, out)
    elif isinstance(t, TBin):
        term_vars(t.a, out)
        term_vars(t.b, out)
    elif isinstance(t, TClamp):
        term_vars(t.a, out)
    return out


def to_prefix(t: Term) -> str:
    """Deterministic prefix rendering, e.g. (== (* x0 x0) 1522756)."""
    if isinstance(t, TConst):
        return str(t.value)
    if isinstance(t, TVar):
        return f"x{t.index}"
    if isinstance(t, TUn):
        return f"({t.op} {to_prefix(t.a)})"
    if isinstance(t, TBin):
        return f"({t.op} {to_prefix(t.a)} {to_prefix(t.b)})"
    if isinstance(t, TClamp):
        return f"(clamp {to_prefix(t.a)} {t.lo} {t.hi})"
    raise AssertionError(f"unhandled term {type(t).__name__}")
