"""Stack-machine bytecode for the concrete interpreter.

The compiler flattens a labeled program into parallel instruction arrays
(op, a, b, c) plus per-instruction source locations for trap reporting.
Values on the operand stack are unsigned 64-bit patterns; every operator
is evaluated at the declared operand width with two's-complement
wrapping, so both interpreter kernels agree with the shared arithmetic
rules bit for bit.

One STEP instruction is emitted at the start of every statement (loop
headers re-step each iteration); goal labels are step-free so that
instrumentation never changes how far a budgeted run gets.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

from .frontend import (
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
    FunctionDef,
    If,
    InputRead,
    Label,
    Program,
    Return,
    Stmt,
    Unary,
    Var,
    While,
)
from .intops import MASK64, from_value

OP_STEP = 1
OP_ICONST = 2
OP_LOAD = 3
OP_STORE = 4
OP_INPUT = 5
OP_CLAMP = 6
OP_BINOP = 7
OP_UNOP = 8
OP_JMP = 9
OP_JZ = 10
OP_JNZ = 11
OP_LABEL_HIT = 12
OP_CALL = 13
OP_RET = 14
OP_POP = 15
OP_ASSERT = 16
OP_ERROR = 17
OP_HALT_BAD = 18

B_ADD, B_SUB, B_MUL, B_DIV, B_MOD = 0, 1, 2, 3, 4
B_EQ, B_NE, B_LT, B_LE, B_GT, B_GE = 5, 6, 7, 8, 9, 10
B_AND, B_OR, B_XOR, B_SHL, B_SHR = 11, 12, 13, 14, 15

U_NEG, U_BNOT, U_LNOT = 0, 1, 2

BINOP_CODES = {
    "+": B_ADD, "-": B_SUB, "*": B_MUL, "/": B_DIV, "%": B_MOD,
    "==": B_EQ, "!=": B_NE, "<": B_LT, "<=": B_LE, ">": B_GT, ">=": B_GE,
    "&": B_AND, "|": B_OR, "^": B_XOR, "<<": B_SHL, ">>": B_SHR,
}
BINOP_NAMES = {v: k for k, v in BINOP_CODES.items()}
UNOP_CODES = {"-": U_NEG, "~": U_BNOT, "!": U_LNOT}

OUT_NORMAL = 0
OUT_ASSERT = 1
OUT_ERROR = 2
OUT_TRAP = 3
OUT_STEP = 4
OUT_INTERNAL = 5

# site ids recorded per dynamic input read, capped per run
SITE_TRACE_CAP = 256


def _s64(pattern: int) -> int:
    p = pattern & MASK64
    return p - (1 << 64) if p >= (1 << 63) else p


@dataclass
class Code:
    ops: array
    a: array
    b: array
    c: array
    lines: array
    cols: array
    entry_pc: int
    main_frame: int
    n_goals: int
    locals_size: int
    stack_size: int
    n_sites: int
    filename: str

    def loc_of(self, pc: int) -> tuple[int, int]:
        return self.lines[pc], self.cols[pc]


class _Compiler:
    def __init__(self, program: Program, n_goals: int):
        self.program = program
        self.n_goals = n_goals
        self.ops: list[int] = []
        self.a: list[int] = []
        self.b: list[int] = []
        self.c: list[int] = []
        self.locs: list[tuple[int, int]] = []
        self.fn_pc: dict[str, int] = {}
        self.call_fixups: list[tuple[int, str]] = []
        self.cur_stack = 0
        self.fn_max_stack = 0

    def emit(self, op: int, a: int = 0, b: int = 0, c: int = 0,
             loc: tuple[int, int] = (0, 0)) -> int:
        pc = len(self.ops)
        self.ops.append(op)
        self.a.append(a)
        self.b.append(b)
        self.c.append(c)
        self.locs.append(loc)
        return pc

    def patch(self, pc: int, target: int):
        self.a[pc] = target

    def push(self, n: int = 1):
        self.cur_stack += n
        if self.cur_stack > self.fn_max_stack:
            self.fn_max_stack = self.cur_stack

    def pop(self, n: int = 1):
        self.cur_stack -= n

    def compile(self) -> Code:
        total_stack = 8
        for fn in self.program.functions:
            self.fn_pc[fn.name] = len(self.ops)
            self.cur_stack = 0
            self.fn_max_stack = 0
            self.compile_block(fn.body)
            self.emit(OP_HALT_BAD, loc=fn.loc)
            total_stack += self.fn_max_stack
        for pc, name in self.call_fixups:
            self.a[pc] = self.fn_pc[name]
        main = self.program.function(self.program.entry)
        locals_size = sum(f.n_slots for f in self.program.functions) + 8
        lines = array("q", [l for l, _ in self.locs])
        cols = array("q", [c for _, c in self.locs])
        return Code(
            ops=array("q", self.ops),
            a=array("q", self.a),
            b=array("q", self.b),
            c=array("q", self.c),
            lines=lines,
            cols=cols,
            entry_pc=self.fn_pc[self.program.entry],
            main_frame=main.n_slots,
            n_goals=self.n_goals,
            locals_size=locals_size,
            stack_size=total_stack + 16,
            n_sites=len(self.program.input_sites),
            filename=self.program.filename,
        )

    # -- statements

    def compile_block(self, stmts: list[Stmt]):
        for st in stmts:
            self.compile_stmt(st)

    def compile_stmt(self, st: Stmt):
        if isinstance(st, Label):
            self.emit(OP_LABEL_HIT, st.goal_id, loc=st.loc)
            return
        self.emit(OP_STEP, loc=getattr(st, "loc", (0, 0)))
        if isinstance(st, Decl):
            self.compile_expr(st.init)
            self.emit(OP_STORE, st.slot, loc=st.loc)
            self.pop()
        elif isinstance(st, Assign):
            self.compile_expr(st.value)
            self.emit(OP_STORE, st.slot, loc=st.loc)
            self.pop()
        elif isinstance(st, CallStmt):
            self.compile_expr(st.call)
            self.emit(OP_POP, loc=st.loc)
            self.pop()
        elif isinstance(st, Return):
            self.compile_expr(st.value)
            self.emit(OP_RET, loc=st.loc)
            self.pop()
        elif isinstance(st, Assert):
            self.compile_expr(st.cond)
            self.emit(OP_ASSERT, st.goal_id, loc=st.loc)
            self.pop()
        elif isinstance(st, ErrorReach):
            self.emit(OP_ERROR, st.goal_id, loc=st.loc)
        elif isinstance(st, If):
            self.compile_expr(st.cond)
            jz = self.emit(OP_JZ, loc=st.loc)
            self.pop()
            self.compile_block(st.then)
            jend = self.emit(OP_JMP, loc=st.loc)
            self.patch(jz, len(self.ops))
            self.compile_block(st.els or [])
            self.patch(jend, len(self.ops))
        elif isinstance(st, While):
            # re-enter at the STEP so each iteration counts
            head = len(self.ops) - 1
            self.compile_expr(st.cond)
            jexit = self.emit(OP_JZ, loc=st.loc)
            self.pop()
            self.compile_block(st.body)
            self.emit(OP_JMP, head, loc=st.loc)
            self.patch(jexit, len(self.ops))
        else:
            raise AssertionError(f"unhandled statement {type(st).__name__}")

    # -- expressions

    def compile_expr(self, e: Expr):
        if isinstance(e, Const):
            self.emit(OP_ICONST, _s64(from_value(e.value, e.ty.width)), loc=e.loc)
            self.push()
        elif isinstance(e, Var):
            self.emit(OP_LOAD, e.slot, loc=e.loc)
            self.push()
        elif isinstance(e, InputRead):
            self.emit(OP_INPUT, e.site, e.ty.width, loc=e.loc)
            self.push()
        elif isinstance(e, Clamp):
            self.compile_expr(e.operand)
            w = e.ty.width
            packed = w + (256 if e.ty.signed else 0)
            self.emit(
                OP_CLAMP,
                _s64(from_value(e.lo, w)),
                _s64(from_value(e.hi, w)),
                packed,
                loc=e.loc,
            )
        elif isinstance(e, Unary):
            self.compile_expr(e.operand)
            self.emit(OP_UNOP, UNOP_CODES[e.op], e.ty.width, loc=e.loc)
        elif isinstance(e, Binary):
            if e.op == "&&":
                self.compile_logical(e, is_and=True)
            elif e.op == "||":
                self.compile_logical(e, is_and=False)
            else:
                self.compile_expr(e.left)
                self.compile_expr(e.right)
                oty = e.left.ty
                self.emit(
                    OP_BINOP,
                    BINOP_CODES[e.op],
                    oty.width,
                    1 if oty.signed else 0,
                    loc=e.loc,
                )
                self.pop()
        elif isinstance(e, Call):
            for arg in e.args:
                self.compile_expr(arg)
            fn = self.program.function(e.name)
            pc = self.emit(OP_CALL, 0, len(e.args), fn.n_slots, loc=e.loc)
            self.call_fixups.append((pc, e.name))
            self.pop(len(e.args))
            self.push()
        else:
            raise AssertionError(f"unhandled expression {type(e).__name__}")

    def compile_logical(self, e: Binary, is_and: bool):
        short_op = OP_JZ if is_and else OP_JNZ
        self.compile_expr(e.left)
        j1 = self.emit(short_op, loc=e.loc)
        self.pop()
        self.compile_expr(e.right)
        j2 = self.emit(short_op, loc=e.loc)
        self.pop()
        self.emit(OP_ICONST, 1 if is_and else 0, loc=e.loc)
        jend = self.emit(OP_JMP, loc=e.loc)
        self.patch(j1, len(self.ops))
        self.patch(j2, len(self.ops))
        self.emit(OP_ICONST, 0 if is_and else 1, loc=e.loc)
        self.patch(jend, len(self.ops))
        self.push()


def compile_program(program: Program, n_goals: int) -> Code:
    """Compile a labeled (and possibly lightened) program. The program
    must come out of the frontend checker: slots, types, and goal ids are
    taken from its annotations."""
    return _Compiler(program, n_goals).compile()
