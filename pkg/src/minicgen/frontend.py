"""MiniC frontend: lexer, parser, semantic checker, pretty printer.

MiniC is a small C-like integer language. The grammar is documented in
docs/minic.md. The parser produces a typed AST; every expression node
carries its integer type after checking, every variable reference its
storage slot, and every `input()` read its input-site id. Later stages
(instrumentation, compilation, symbolic unrolling) consume these
annotations and never re-run name or type resolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SyntaxErrorMC, TypeErrorMC
from .intops import BINARY_OPS, domain

# ---------------------------------------------------------------------------
# Types

@dataclass(frozen=True)
class IntType:
    width: int
    signed: bool

    @property
    def name(self) -> str:
        if self.width == 32:
            return "int" if self.signed else "uint"
        return "long" if self.signed else "ulong"

    def domain(self) -> tuple[int, int]:
        return domain(self.width, self.signed)


INT = IntType(32, True)
UINT = IntType(32, False)
LONG = IntType(64, True)
ULONG = IntType(64, False)

TYPE_NAMES = {"int": INT, "uint": UINT, "long": LONG, "ulong": ULONG}

Loc = tuple[int, int]


# ---------------------------------------------------------------------------
# AST
#
# `loc` fields never participate in equality so that a parse/pretty/reparse
# round trip compares structurally identical.

@dataclass
class Expr:
    pass


@dataclass
class Const(Expr):
    value: int
    ty: IntType | None = None
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Var(Expr):
    name: str
    ty: IntType | None = None
    slot: int = -1
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class InputRead(Expr):
    site: int = -1
    ty: IntType | None = None
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Unary(Expr):
    op: str
    operand: Expr
    ty: IntType | None = None
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr
    ty: IntType | None = None
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Call(Expr):
    name: str
    args: list[Expr]
    ty: IntType | None = None
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Clamp(Expr):
    """Internal node, produced only by program lightening: clamp the
    operand into [lo, hi] (values in the operand's type domain)."""

    operand: Expr
    lo: int = 0
    hi: int = 0
    ty: IntType | None = None
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Stmt:
    pass


@dataclass
class Decl(Stmt):
    ty: IntType
    name: str
    init: Expr
    slot: int = -1
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Assign(Stmt):
    name: str
    value: Expr
    slot: int = -1
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class If(Stmt):
    cond: Expr
    then: list[Stmt]
    els: list[Stmt] | None
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class While(Stmt):
    cond: Expr
    body: list[Stmt]
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Return(Stmt):
    value: Expr
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Assert(Stmt):
    cond: Expr
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class ErrorReach(Stmt):
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class CallStmt(Stmt):
    call: Call
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Label(Stmt):
    """Coverage goal marker, injected by instrumentation. Side-effect
    free; the interpreter records the goal id and carries on."""

    goal_id: int
    kind: str = ""
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Param:
    ty: IntType
    name: str
    slot: int = -1
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class FunctionDef:
    ret: IntType
    name: str
    params: list[Param]
    body: list[Stmt]
    n_slots: int = 0
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class InputSite:
    id: int
    width: int
    signed: bool


@dataclass
class Program:
    functions: list[FunctionDef]
    entry: str = "main"
    input_sites: list[InputSite] = field(default_factory=list)
    filename: str = "<input>"

    def function(self, name: str) -> FunctionDef:
        for fn in self.functions:
            if fn.name == name:
                return fn
        raise KeyError(name)

    def __eq__(self, other):
        if not isinstance(other, Program):
            return NotImplemented
        return (
            self.functions == other.functions
            and self.entry == other.entry
            and self.input_sites == other.input_sites
        )


TERMINATORS = (Return, ErrorReach)


# ---------------------------------------------------------------------------
# Lexer

KEYWORDS = frozenset(
    {"int", "uint", "long", "ulong", "if", "else", "while", "return",
     "assert", "error", "input"}
)

# Longest match first.
_OPERATORS = [
    "&&", "||", "==", "!=", "<=", ">=", "<<", ">>",
    "(", ")", "{", "}", ";", ",", "=", "<", ">",
    "+", "-", "*", "/", "%", "!", "~", "&", "|", "^",
]


@dataclass
class Token:
    kind: str  # "ident", "int", "kw", "op", "eof"
    text: str
    value: int
    line: int
    col: int


def tokenize(source: str, filename: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            i = n if j < 0 else j
            continue
        if source.startswith("/*", i):
            j = source.find("*/", i + 2)
            if j < 0:
                raise SyntaxErrorMC("unterminated block comment", line, col, filename)
            skipped = source[i : j + 2]
            nl = skipped.count("\n")
            if nl:
                line += nl
                col = len(skipped) - skipped.rfind("\n")
            else:
                col += len(skipped)
            i = j + 2
            continue
        if c.isdigit():
            start = i
            if source.startswith(("0x", "0X"), i):
                i += 2
                while i < n and source[i] in "0123456789abcdefABCDEF":
                    i += 1
                if i == start + 2:
                    raise SyntaxErrorMC("malformed hex literal", line, col, filename)
                value = int(source[start:i], 16)
            else:
                while i < n and source[i].isdigit():
                    i += 1
                value = int(source[start:i])
            if i < n and (source[i].isalpha() or source[i] == "_"):
                raise SyntaxErrorMC("malformed integer literal", line, col, filename)
            toks.append(Token("int", source[start:i], value, line, col))
            col += i - start
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            text = source[start:i]
            kind = "kw" if text in KEYWORDS else "ident"
            toks.append(Token(kind, text, 0, line, col))
            col += i - start
            continue
        for op in _OPERATORS:
            if source.startswith(op, i):
                toks.append(Token("op", op, 0, line, col))
                i += len(op)
                col += len(op)
                break
        else:
            raise SyntaxErrorMC(f"unexpected character {c!r}", line, col, filename)
    toks.append(Token("eof", "", 0, line, col))
    return toks


# ---------------------------------------------------------------------------
# Parser

_BIN_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
}
assert set(_BIN_PREC) == set(BINARY_OPS)


class _Parser:
    def __init__(self, toks: list[Token], filename: str):
        self.toks = toks
        self.pos = 0
        self.filename = filename

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def fail(self, msg: str, tok: Token | None = None):
        t = tok or self.peek()
        raise SyntaxErrorMC(msg, t.line, t.col, self.filename)

    def expect_op(self, op: str) -> Token:
        t = self.peek()
        if t.kind != "op" or t.text != op:
            self.fail(f"expected {op!r}, found {t.text or 'end of input'!r}")
        return self.next()

    def accept_op(self, op: str) -> bool:
        t = self.peek()
        if t.kind == "op" and t.text == op:
            self.pos += 1
            return True
        return False

    def accept_kw(self, kw: str) -> bool:
        t = self.peek()
        if t.kind == "kw" and t.text == kw:
            self.pos += 1
            return True
        return False

    def expect_ident(self) -> Token:
        t = self.peek()
        if t.kind != "ident":
            self.fail(f"expected identifier, found {t.text or 'end of input'!r}")
        return self.next()

    # -- program structure

    def parse_program(self) -> Program:
        functions = []
        while self.peek().kind != "eof":
            functions.append(self.parse_function())
        if not functions:
            self.fail("empty program")
        return Program(functions=functions, filename=self.filename)

    def parse_type(self) -> tuple[IntType, Token]:
        t = self.peek()
        if t.kind == "kw" and t.text in TYPE_NAMES:
            self.next()
            return TYPE_NAMES[t.text], t
        self.fail(f"expected a type name, found {t.text or 'end of input'!r}")

    def parse_function(self) -> FunctionDef:
        ret, rt = self.parse_type()
        name = self.expect_ident()
        self.expect_op("(")
        params: list[Param] = []
        if not self.accept_op(")"):
            while True:
                pty, _ = self.parse_type()
                pname = self.expect_ident()
                params.append(Param(pty, pname.text, loc=(pname.line, pname.col)))
                if self.accept_op(")"):
                    break
                self.expect_op(",")
        body = self.parse_block()
        return FunctionDef(ret, name.text, params, body, loc=(rt.line, rt.col))

    def parse_block(self) -> list[Stmt]:
        self.expect_op("{")
        stmts: list[Stmt] = []
        while not self.accept_op("}"):
            if self.peek().kind == "eof":
                self.fail("unexpected end of input inside block")
            stmts.append(self.parse_stmt())
        return stmts

    # -- statements

    def parse_stmt(self) -> Stmt:
        t = self.peek()
        if t.kind == "kw":
            if t.text in TYPE_NAMES:
                return self.parse_decl()
            if t.text == "if":
                return self.parse_if()
            if t.text == "while":
                return self.parse_while()
            if t.text == "return":
                return self.parse_return()
            if t.text == "assert":
                return self.parse_assert()
            if t.text == "error":
                self.next()
                self.expect_op("(")
                self.expect_op(")")
                self.expect_op(";")
                return ErrorReach(loc=(t.line, t.col))
            self.fail(f"unexpected keyword {t.text!r}")
        if t.kind == "ident":
            name = self.next()
            if self.accept_op("="):
                value = self.parse_expr()
                self.expect_op(";")
                return Assign(name.text, value, loc=(name.line, name.col))
            if self.peek().kind == "op" and self.peek().text == "(":
                call = self.finish_call(name)
                self.expect_op(";")
                return CallStmt(call, loc=(name.line, name.col))
            self.fail("expected '=' or '(' after identifier", name)
        self.fail(f"unexpected token {t.text or 'end of input'!r}")

    def parse_decl(self) -> Decl:
        ty, tt = self.parse_type()
        name = self.expect_ident()
        if self.accept_op("="):
            init = self.parse_expr()
        else:
            init = Const(0, loc=(name.line, name.col))
        self.expect_op(";")
        return Decl(ty, name.text, init, loc=(tt.line, tt.col))

    def parse_if(self) -> If:
        t = self.next()
        self.expect_op("(")
        cond = self.parse_expr()
        self.expect_op(")")
        then = self.parse_block()
        els: list[Stmt] | None = None
        if self.accept_kw("else"):
            if self.peek().kind == "kw" and self.peek().text == "if":
                els = [self.parse_if()]
            else:
                els = self.parse_block()
        return If(cond, then, els, loc=(t.line, t.col))

    def parse_while(self) -> While:
        t = self.next()
        self.expect_op("(")
        cond = self.parse_expr()
        self.expect_op(")")
        body = self.parse_block()
        return While(cond, body, loc=(t.line, t.col))

    def parse_return(self) -> Return:
        t = self.next()
        if self.accept_op(";"):
            return Return(Const(0, loc=(t.line, t.col)), loc=(t.line, t.col))
        value = self.parse_expr()
        self.expect_op(";")
        return Return(value, loc=(t.line, t.col))

    def parse_assert(self) -> Assert:
        t = self.next()
        self.expect_op("(")
        cond = self.parse_expr()
        self.expect_op(")")
        self.expect_op(";")
        return Assert(cond, loc=(t.line, t.col))

    # -- expressions (precedence climbing)

    def parse_expr(self, min_prec: int = 1) -> Expr:
        left = self.parse_unary()
        while True:
            t = self.peek()
            if t.kind != "op":
                return left
            prec = _BIN_PREC.get(t.text, 0)
            if prec < min_prec:
                return left
            self.next()
            right = self.parse_expr(prec + 1)
            left = Binary(t.text, left, right, loc=(t.line, t.col))

    def parse_unary(self) -> Expr:
        t = self.peek()
        if t.kind == "op" and t.text in ("-", "~", "!"):
            self.next()
            operand = self.parse_unary()
            if t.text == "-" and isinstance(operand, Const):
                # Fold so INT_MIN-style literals check against the folded value.
                return Const(-operand.value, loc=(t.line, t.col))
            return Unary(t.text, operand, loc=(t.line, t.col))
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        t = self.peek()
        if t.kind == "int":
            self.next()
            return Const(t.value, loc=(t.line, t.col))
        if t.kind == "kw" and t.text == "input":
            self.next()
            self.expect_op("(")
            self.expect_op(")")
            return InputRead(loc=(t.line, t.col))
        if t.kind == "ident":
            name = self.next()
            if self.peek().kind == "op" and self.peek().text == "(":
                return self.finish_call(name)
            return Var(name.text, loc=(name.line, name.col))
        if t.kind == "op" and t.text == "(":
            self.next()
            e = self.parse_expr()
            self.expect_op(")")
            return e
        self.fail(f"expected expression, found {t.text or 'end of input'!r}")

    def finish_call(self, name: Token) -> Call:
        self.expect_op("(")
        args: list[Expr] = []
        if not self.accept_op(")"):
            while True:
                args.append(self.parse_expr())
                if self.accept_op(")"):
                    break
                self.expect_op(",")
        return Call(name.text, args, loc=(name.line, name.col))


# ---------------------------------------------------------------------------
# Semantic checker

class _Checker:
    def __init__(self, program: Program, default_input_width: int):
        self.program = program
        self.filename = program.filename
        self.default_input_ty = IntType(default_input_width, True)
        self.fns: dict[str, FunctionDef] = {}
        self.calls: dict[str, set[str]] = {}
        self.sites: list[InputSite] = []

    def fail(self, msg: str, loc: Loc):
        raise TypeErrorMC(msg, loc[0], loc[1], self.filename)

    def run(self):
        for fn in self.program.functions:
            if fn.name in self.fns:
                self.fail(f"duplicate function '{fn.name}'", fn.loc)
            if fn.name.startswith("__"):
                self.fail("identifiers starting with '__' are reserved", fn.loc)
            self.fns[fn.name] = fn
        entry = self.program.entry
        if entry not in self.fns:
            raise TypeErrorMC(f"missing entry function '{entry}'", 1, 1, self.filename)
        main = self.fns[entry]
        if main.params:
            self.fail(f"'{entry}' takes no parameters", main.loc)
        if main.ret != INT:
            self.fail(f"'{entry}' must return int", main.loc)
        for fn in self.program.functions:
            self.check_function(fn)
        self.check_call_graph()
        self.program.input_sites = self.sites

    # -- function-level checks

    def check_function(self, fn: FunctionDef):
        self.calls[fn.name] = set()
        self.current = fn
        self.scope: dict[str, tuple[int, IntType]] = {}
        next_slot = 0
        for p in fn.params:
            if p.name.startswith("__"):
                self.fail("identifiers starting with '__' are reserved", p.loc)
            if p.name in self.scope:
                self.fail(f"duplicate parameter '{p.name}'", p.loc)
            p.slot = next_slot
            self.scope[p.name] = (next_slot, p.ty)
            next_slot += 1
        self.next_slot = next_slot
        self.check_block(fn.body)
        fn.n_slots = self.next_slot
        if not fn.body or not isinstance(fn.body[-1], TERMINATORS):
            fn.body.append(Return(Const(0, ty=fn.ret), loc=fn.loc))

    def check_block(self, stmts: list[Stmt]):
        for i, st in enumerate(stmts):
            if i > 0 and isinstance(stmts[i - 1], TERMINATORS):
                self.fail("unreachable statement", getattr(st, "loc", (0, 0)))
            self.check_stmt(st)

    def check_stmt(self, st: Stmt):
        if isinstance(st, Decl):
            if st.name.startswith("__"):
                self.fail("identifiers starting with '__' are reserved", st.loc)
            if st.name in self.scope:
                self.fail(f"redeclaration of '{st.name}'", st.loc)
            self.check_expr(st.init, expected=st.ty, call_ok=True)
            st.slot = self.next_slot
            self.next_slot += 1
            self.scope[st.name] = (st.slot, st.ty)
        elif isinstance(st, Assign):
            if st.name not in self.scope:
                self.fail(f"assignment to undeclared variable '{st.name}'", st.loc)
            slot, ty = self.scope[st.name]
            st.slot = slot
            self.check_expr(st.value, expected=ty, call_ok=True)
        elif isinstance(st, If):
            self.check_expr(st.cond)
            self.check_block(st.then)
            if st.els is not None:
                self.check_block(st.els)
        elif isinstance(st, While):
            self.check_expr(st.cond)
            self.check_block(st.body)
        elif isinstance(st, Return):
            self.check_expr(st.value, expected=self.current.ret)
        elif isinstance(st, Assert):
            self.check_expr(st.cond)
        elif isinstance(st, CallStmt):
            self.check_expr(st.call, call_ok=True)
        elif isinstance(st, (ErrorReach, Label)):
            pass
        else:
            raise AssertionError(f"unhandled statement {type(st).__name__}")

    # -- expressions
    #
    # Every binary operator except && and || requires both operand types to
    # match; bare literals adopt the type of the other side (or of the
    # surrounding declaration/assignment/return/argument). Comparison and
    # logical results are int. A call may only be the entire right-hand
    # side of a declaration or assignment, or a call statement.

    def check_expr(
        self, e: Expr, expected: IntType | None = None, call_ok: bool = False
    ) -> IntType:
        ty = self.infer(e, expected, call_ok)
        if expected is not None and ty != expected:
            self.fail(
                f"expected {expected.name}, found {ty.name}",
                getattr(e, "loc", (0, 0)),
            )
        return ty

    def infer(self, e: Expr, expected: IntType | None, call_ok: bool = False) -> IntType:
        if isinstance(e, Const):
            ty = expected or self.literal_type(e)
            lo, hi = ty.domain()
            if not lo <= e.value <= hi:
                self.fail(f"literal {e.value} does not fit {ty.name}", e.loc)
            e.ty = ty
            return ty
        if isinstance(e, Var):
            if e.name not in self.scope:
                self.fail(f"undeclared variable '{e.name}'", e.loc)
            e.slot, e.ty = self.scope[e.name]
            return e.ty
        if isinstance(e, InputRead):
            ty = expected or self.default_input_ty
            e.ty = ty
            e.site = len(self.sites)
            self.sites.append(InputSite(e.site, ty.width, ty.signed))
            return ty
        if isinstance(e, Unary):
            if e.op == "!":
                self.check_expr(e.operand)
                e.ty = INT
            else:
                e.ty = self.check_expr(e.operand, expected=expected)
            return e.ty
        if isinstance(e, Binary):
            return self.infer_binary(e, expected)
        if isinstance(e, Call):
            if not call_ok:
                self.fail(
                    "a call may only be the entire right-hand side of a "
                    "declaration or assignment, or a call statement",
                    e.loc,
                )
            if e.name not in self.fns:
                self.fail(f"call to undefined function '{e.name}'", e.loc)
            fn = self.fns[e.name]
            self.calls[self.current.name].add(e.name)
            if len(e.args) != len(fn.params):
                self.fail(
                    f"'{e.name}' expects {len(fn.params)} argument(s), "
                    f"got {len(e.args)}",
                    e.loc,
                )
            for arg, p in zip(e.args, fn.params):
                self.check_expr(arg, expected=p.ty)
            e.ty = fn.ret
            return fn.ret
        raise AssertionError(f"unhandled expression {type(e).__name__}")

    def infer_binary(self, e: Binary, expected: IntType | None) -> IntType:
        if e.op in ("&&", "||"):
            if self.reads_input(e.right):
                self.fail(
                    f"input() may not appear in the right operand of {e.op!r}",
                    e.loc,
                )
            self.check_expr(e.left)
            self.check_expr(e.right)
            e.ty = INT
            return INT
        comparison = e.op in ("==", "!=", "<", "<=", ">", ">=")
        hint = None if comparison else expected
        lific = isinstance(e.left, Const)
        rific = isinstance(e.right, Const)
        if lific and not rific:
            rty = self.infer(e.right, hint)
            self.check_expr(e.left, expected=rty)
            ty = rty
        elif rific and not lific:
            lty = self.infer(e.left, hint)
            self.check_expr(e.right, expected=lty)
            ty = lty
        else:
            lty = self.infer(e.left, hint)
            rty = self.infer(e.right, lty if rific else None)
            if lty != rty:
                self.fail(
                    f"operand types differ: {lty.name} {e.op} {rty.name}", e.loc
                )
            ty = lty
        e.ty = INT if comparison else ty
        return e.ty

    def literal_type(self, e: Const) -> IntType:
        lo, hi = INT.domain()
        if lo <= e.value <= hi:
            return INT
        lo, hi = LONG.domain()
        if lo <= e.value <= hi:
            return LONG
        self.fail(f"literal {e.value} does not fit any integer type", e.loc)

    def reads_input(self, e: Expr) -> bool:
        if isinstance(e, InputRead):
            return True
        if isinstance(e, Unary):
            return self.reads_input(e.operand)
        if isinstance(e, Binary):
            return self.reads_input(e.left) or self.reads_input(e.right)
        if isinstance(e, Call):
            return any(self.reads_input(a) for a in e.args)
        if isinstance(e, Clamp):
            return self.reads_input(e.operand)
        return False

    # -- call graph: reject recursion and functions unreachable from entry

    def check_call_graph(self):
        state: dict[str, int] = {}  # 0 visiting, 1 done

        def visit(name: str, chain: list[str]):
            if state.get(name) == 0:
                cyc = " -> ".join(chain[chain.index(name):])
                self.fail(f"recursion is not supported: {cyc}", self.fns[name].loc)
            if state.get(name) == 1:
                return
            state[name] = 0
            for callee in sorted(self.calls[name]):
                visit(callee, chain + [callee])
            state[name] = 1

        visit(self.program.entry, [self.program.entry])
        for fn in self.program.functions:
            if fn.name not in state:
                self.fail(
                    f"function '{fn.name}' is never called from "
                    f"'{self.program.entry}'",
                    fn.loc,
                )


def parse(source: str, filename: str = "<input>", default_input_width: int = 32) -> Program:
    """Parse and check MiniC source; returns a fully annotated Program.

    `default_input_width` types `input()` reads that are not the entire
    right-hand side of a declaration or assignment (those take the
    declared variable's type). Raises SyntaxErrorMC or TypeErrorMC.
    """
    if default_input_width not in (32, 64):
        raise ValueError("default_input_width must be 32 or 64")
    toks = tokenize(source, filename)
    program = _Parser(toks, filename).parse_program()
    _Checker(program, default_input_width).run()
    return program


# ---------------------------------------------------------------------------
# Pretty printer

_UNARY_PREC = 11


def _expr_prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return _BIN_PREC[e.op]
    if isinstance(e, Unary):
        return _UNARY_PREC
    return 12


def format_expr(e: Expr) -> str:
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, InputRead):
        return "input()"
    if isinstance(e, Unary):
        inner = format_expr(e.operand)
        if _expr_prec(e.operand) < _UNARY_PREC:
            inner = f"({inner})"
        return e.op + inner
    if isinstance(e, Binary):
        prec = _BIN_PREC[e.op]
        left = format_expr(e.left)
        if _expr_prec(e.left) < prec:
            left = f"({left})"
        right = format_expr(e.right)
        if _expr_prec(e.right) <= prec:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, Clamp):
        return f"__clamp({format_expr(e.operand)}, {e.lo}, {e.hi})"
    raise AssertionError(f"unhandled expression {type(e).__name__}")


def _format_block(stmts: list[Stmt], out: list[str], indent: int):
    pad = "    " * indent
    for st in stmts:
        if isinstance(st, Decl):
            out.append(f"{pad}{st.ty.name} {st.name} = {format_expr(st.init)};")
        elif isinstance(st, Assign):
            out.append(f"{pad}{st.name} = {format_expr(st.value)};")
        elif isinstance(st, If):
            out.append(f"{pad}if ({format_expr(st.cond)}) {{")
            _format_block(st.then, out, indent + 1)
            node = st
            while node.els is not None and len(node.els) == 1 and isinstance(node.els[0], If):
                node = node.els[0]
                out.append(f"{pad}}} else if ({format_expr(node.cond)}) {{")
                _format_block(node.then, out, indent + 1)
            if node.els is not None:
                out.append(f"{pad}}} else {{")
                _format_block(node.els, out, indent + 1)
            out.append(f"{pad}}}")
        elif isinstance(st, While):
            out.append(f"{pad}while ({format_expr(st.cond)}) {{")
            _format_block(st.body, out, indent + 1)
            out.append(f"{pad}}}")
        elif isinstance(st, Return):
            out.append(f"{pad}return {format_expr(st.value)};")
        elif isinstance(st, Assert):
            out.append(f"{pad}assert({format_expr(st.cond)});")
        elif isinstance(st, ErrorReach):
            out.append(f"{pad}error();")
        elif isinstance(st, CallStmt):
            out.append(f"{pad}{format_expr(st.call)};")
        elif isinstance(st, Label):
            out.append(f"{pad}// goal {st.goal_id}: {st.kind}")
        else:
            raise AssertionError(f"unhandled statement {type(st).__name__}")


def pretty(program: Program) -> str:
    """Render a Program as MiniC source. For unlabeled programs the output
    reparses to a structurally identical AST; injected labels render as
    comments (annotation only, not meant to be reparsed)."""
    out: list[str] = []
    for fn in program.functions:
        params = ", ".join(f"{p.ty.name} {p.name}" for p in fn.params)
        out.append(f"{fn.ret.name} {fn.name}({params}) {{")
        _format_block(fn.body, out, 1)
        out.append("}")
        out.append("")
    return "\n".join(out)
