"""Goal-label injection, program lightening, and input-guard inference.

Instrumentation places a coverage goal at every branch arm, loop body,
function entry, and error site. Lightening produces the variant used by
the seed-generation phase: loops get a hard iteration bound and input
reads are clamped into a narrow interval so random inputs survive the
program's own validation guards.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .intops import domain

from .frontend import (
    INT,
    Assert,
    Assign,
    Binary,
    Call,
    CallStmt,
    Clamp,
    Const,
    Decl,
    ErrorReach,
    Expr,
    If,
    InputRead,
    IntType,
    Label,
    Program,
    Return,
    Stmt,
    Unary,
    Var,
    While,
    format_expr,
)

KIND_FUNCTION_ENTRY = "function-entry"
KIND_THEN = "then-branch"
KIND_ELSE = "else-branch"
KIND_LOOP_BODY = "loop-body"
KIND_ERROR = "error-reach"


@dataclass
class GoalLabel:
    id: int
    kind: str
    function: str
    path: str
    depth: int = -1
    # True for assertion goals: hit only when the assertion fails, so they
    # do not count toward block depth weighting.
    on_failure: bool = False


@dataclass
class GoalTable:
    goals: list[GoalLabel] = field(default_factory=list)
    by_block: dict[int, list[int]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.goals)

    def goal(self, goal_id: int) -> GoalLabel:
        return self.goals[goal_id]

    def depth_of(self, goal_id: int) -> int:
        return self.goals[goal_id].depth


class _Injector:
    def __init__(self):
        self.goals: list[GoalLabel] = []

    def new_goal(self, kind: str, fn: str, path: str, on_failure: bool = False) -> GoalLabel:
        g = GoalLabel(len(self.goals), kind, fn, path, on_failure=on_failure)
        self.goals.append(g)
        return g

    def walk(self, stmts: list[Stmt], fn: str, prefix: str) -> list[Stmt]:
        out: list[Stmt] = []
        for i, st in enumerate(stmts):
            path = f"{prefix}{i}"
            if isinstance(st, If):
                g_then = self.new_goal(KIND_THEN, fn, f"{path}.then")
                st.then = [Label(g_then.id, KIND_THEN, loc=st.loc)] + self.walk(
                    st.then, fn, f"{path}.then."
                )
                els = st.els if st.els is not None else []
                g_else = self.new_goal(KIND_ELSE, fn, f"{path}.else")
                st.els = [Label(g_else.id, KIND_ELSE, loc=st.loc)] + self.walk(
                    els, fn, f"{path}.else."
                )
                out.append(st)
            elif isinstance(st, While):
                g = self.new_goal(KIND_LOOP_BODY, fn, f"{path}.body")
                st.body = [Label(g.id, KIND_LOOP_BODY, loc=st.loc)] + self.walk(
                    st.body, fn, f"{path}.body."
                )
                out.append(st)
            elif isinstance(st, ErrorReach):
                g = self.new_goal(KIND_ERROR, fn, path)
                st.goal_id = g.id
                out.append(Label(g.id, KIND_ERROR, loc=st.loc))
                out.append(st)
            elif isinstance(st, Assert):
                g = self.new_goal(KIND_ERROR, fn, path, on_failure=True)
                st.goal_id = g.id
                out.append(st)
            else:
                out.append(st)
        return out


def inject_labels(program: Program) -> tuple[Program, GoalTable]:
    """Return a labeled copy of the program plus its goal table.

    Total label count is #functions + 2*#if + #while + #error-sites,
    where error sites are error() and assert() statements. Ids follow a
    pre-order walk: functions in source order, then-arm before else-arm.
    """
    prog = copy.deepcopy(program)
    inj = _Injector()
    counts = [0, 0, 0, 0]  # functions, ifs, whiles, error sites
    _count(prog, counts)
    for fn in prog.functions:
        g = inj.new_goal(KIND_FUNCTION_ENTRY, fn.name, "entry")
        fn.body = [Label(g.id, KIND_FUNCTION_ENTRY, loc=fn.loc)] + inj.walk(
            fn.body, fn.name, ""
        )
    table = GoalTable(goals=inj.goals)
    expected = counts[0] + 2 * counts[1] + counts[2] + counts[3]
    if len(table) != expected:
        raise AssertionError(
            f"label count {len(table)} != counting rule {expected}"
        )
    return prog, table


def _count(prog: Program, counts: list[int]):
    def walk(stmts):
        for st in stmts:
            if isinstance(st, If):
                counts[1] += 1
                walk(st.then)
                if st.els is not None:
                    walk(st.els)
            elif isinstance(st, While):
                counts[2] += 1
                walk(st.body)
            elif isinstance(st, (ErrorReach, Assert)):
                counts[3] += 1

    for fn in prog.functions:
        counts[0] += 1
        walk(fn.body)


# ---------------------------------------------------------------------------
# Input-guard inference

_FLIP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}


@dataclass
class InputConstraints:
    """Per-input-site intervals implied by the program's own validation
    guards, plus the guard statements each bound came from."""

    intervals: dict[int, tuple[int, int]] = field(default_factory=dict)
    provenance: dict[int, list[str]] = field(default_factory=dict)
    full: dict[int, tuple[int, int]] = field(default_factory=dict)

    def interval(self, site: int) -> tuple[int, int]:
        return self.intervals[site]

    def is_full(self, site: int) -> bool:
        return self.intervals[site] == self.full[site]


def _match_guard(cond: Expr) -> tuple[str, str, int] | None:
    """Recognize `var OP const` or `const OP var`; returns (var, op, c)."""
    if not isinstance(cond, Binary) or cond.op not in _FLIP:
        return None
    if isinstance(cond.left, Var) and isinstance(cond.right, Const):
        return cond.left.name, cond.op, cond.right.value
    if isinstance(cond.left, Const) and isinstance(cond.right, Var):
        return cond.right.name, _FLIP[cond.op], cond.left.value
    return None


def _refine(iv: tuple[int, int], op: str, c: int, positive: bool) -> tuple[int, int]:
    """Intersect iv with `x OP c` (positive) or its negation."""
    lo, hi = iv
    if not positive:
        # !(x < c) is x >= c, and so on; == has no interval negation.
        neg = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "!=": "==", "==": None}
        op = neg[op]
        if op is None:
            return iv
    if op == "<":
        hi = min(hi, c - 1)
    elif op == "<=":
        hi = min(hi, c)
    elif op == ">":
        lo = max(lo, c + 1)
    elif op == ">=":
        lo = max(lo, c)
    elif op == "==":
        lo, hi = max(lo, c), min(hi, c)
    return lo, hi


def _non_label(stmts: list[Stmt]) -> list[Stmt]:
    return [s for s in stmts if not isinstance(s, Label)]


def infer_input_constraints(program: Program) -> InputConstraints:
    """Read validation guards off the entry function's straight-line prefix.

    Recognized shapes, scanning top-level statements until anything else
    appears: bindings `x = input()`, early exits `if (x OP c) { return ...; }`
    with an empty or absent else arm, and assume-style `assert(x OP c);`.
    Unrecognized guards are ignored; a site with no usable guard keeps the
    full range of its type. Works on labeled or unlabeled programs.
    """
    cons = InputConstraints()
    for site in program.input_sites:
        full = domain(site.width, site.signed)
        cons.intervals[site.id] = full
        cons.full[site.id] = full
        cons.provenance[site.id] = []
    bound: dict[str, int] = {}
    entry = program.function(program.entry)

    def apply(site: int, op: str, c: int, positive: bool, st: Stmt, cond: Expr):
        lo, hi = _refine(cons.intervals[site], op, c, positive)
        if (lo, hi) == cons.intervals[site]:
            return
        if lo > hi:
            cons.provenance[site].append(
                f"{program.entry}:{st.loc[0]}: contradictory guard "
                f"{format_expr(cond)} ignored"
            )
            return
        cons.intervals[site] = (lo, hi)
        cons.provenance[site].append(
            f"{program.entry}:{st.loc[0]}: {format_expr(cond)}"
        )

    for st in entry.body:
        if isinstance(st, Label):
            continue
        if isinstance(st, Decl):
            if isinstance(st.init, InputRead):
                bound[st.name] = st.init.site
            else:
                bound.pop(st.name, None)
            continue
        if isinstance(st, Assign):
            if isinstance(st.value, InputRead):
                bound[st.name] = st.value.site
            else:
                bound.pop(st.name, None)
            continue
        if isinstance(st, Assert):
            m = _match_guard(st.cond)
            if m and m[0] in bound:
                apply(bound[m[0]], m[1], m[2], True, st, st.cond)
                continue
            break
        if isinstance(st, If):
            m = _match_guard(st.cond)
            then = _non_label(st.then)
            els = _non_label(st.els) if st.els is not None else []
            is_exit = len(then) == 1 and isinstance(then[0], Return) and not els
            if m and m[0] in bound and is_exit:
                apply(bound[m[0]], m[1], m[2], False, st, st.cond)
                continue
            break
        break
    return cons


# ---------------------------------------------------------------------------
# Lightening

def _intersect(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    return max(a[0], b[0]), min(a[1], b[1])


def _clamp_interval(
    ty: IntType,
    inferred: tuple[int, int],
    full: tuple[int, int],
    default_range: tuple[int, int],
) -> tuple[int, int]:
    if inferred == full:
        cand = _intersect(default_range, full)
    else:
        cand = _intersect(_intersect(inferred, default_range), full)
        if cand[0] > cand[1]:
            cand = inferred  # guards demand values outside the narrow default
    if cand[0] > cand[1]:
        cand = full
    return cand


class _Lightener:
    def __init__(self, loop_bound: int, default_range: tuple[int, int], cons: InputConstraints):
        self.loop_bound = loop_bound
        self.default_range = default_range
        self.cons = cons
        self.counter = 0

    def rewrite_expr(self, e: Expr) -> Expr:
        if isinstance(e, InputRead):
            full = self.cons.full[e.site]
            lo, hi = _clamp_interval(
                e.ty, self.cons.intervals[e.site], full, self.default_range
            )
            if (lo, hi) == full:
                return e
            return Clamp(e, lo, hi, ty=e.ty, loc=e.loc)
        if isinstance(e, Unary):
            e.operand = self.rewrite_expr(e.operand)
        elif isinstance(e, Binary):
            e.left = self.rewrite_expr(e.left)
            e.right = self.rewrite_expr(e.right)
        elif isinstance(e, Call):
            e.args = [self.rewrite_expr(a) for a in e.args]
        elif isinstance(e, Clamp):
            e.operand = self.rewrite_expr(e.operand)
        return e

    def walk(self, stmts: list[Stmt], fn) -> list[Stmt]:
        out: list[Stmt] = []
        for st in stmts:
            if isinstance(st, Decl):
                st.init = self.rewrite_expr(st.init)
                out.append(st)
            elif isinstance(st, Assign):
                st.value = self.rewrite_expr(st.value)
                out.append(st)
            elif isinstance(st, (Return,)):
                st.value = self.rewrite_expr(st.value)
                out.append(st)
            elif isinstance(st, Assert):
                st.cond = self.rewrite_expr(st.cond)
                out.append(st)
            elif isinstance(st, CallStmt):
                st.call = self.rewrite_expr(st.call)
                out.append(st)
            elif isinstance(st, If):
                st.cond = self.rewrite_expr(st.cond)
                st.then = self.walk(st.then, fn)
                st.els = self.walk(st.els, fn) if st.els is not None else None
                out.append(st)
            elif isinstance(st, While):
                st.cond = self.rewrite_expr(st.cond)
                st.body = self.walk(st.body, fn)
                name = f"__lb{self.counter}"
                self.counter += 1
                slot = fn.n_slots
                fn.n_slots += 1
                ctr = Var(name, ty=INT, slot=slot, loc=st.loc)
                st.cond = Binary(
                    "&&",
                    st.cond,
                    Binary("<", ctr, Const(self.loop_bound, ty=INT), ty=INT, loc=st.loc),
                    ty=INT,
                    loc=st.loc,
                )
                bump = Assign(
                    name,
                    Binary("+", ctr, Const(1, ty=INT), ty=INT, loc=st.loc),
                    slot=slot,
                    loc=st.loc,
                )
                # Keep any goal label first in the loop body.
                body = st.body
                if body and isinstance(body[0], Label):
                    st.body = [body[0], bump] + body[1:]
                else:
                    st.body = [bump] + body
                out.append(Decl(INT, name, Const(0, ty=INT), slot=slot, loc=st.loc))
                out.append(st)
            else:
                out.append(st)
        return out


def lighten(
    program: Program,
    loop_bound: int = 2,
    default_range: tuple[int, int] = (-1024, 1024),
) -> Program:
    """Bounded, clamped copy of a (typically labeled) program.

    Every loop runs at most loop_bound iterations: the loop condition gains
    a fresh counter check (original condition first, so input reads are
    consumed exactly as in the unbounded program until cutoff). Every input
    read is clamped into its inferred guard interval intersected with
    default_range; when they are disjoint the guard interval wins.
    """
    if loop_bound < 1:
        raise ValueError("loop_bound must be >= 1")
    cons = infer_input_constraints(program)
    prog = copy.deepcopy(program)
    lightener = _Lightener(loop_bound, default_range, cons)
    for fn in prog.functions:
        fn.body = lightener.walk(fn.body, fn)
    return prog
