"""Bounded path exploration that turns goal labels into test inputs.

The unroller walks the labeled program symbolically: loops are expanded
at most k times, calls are inlined (the front end rules out recursion),
and every conditional forks the path with the branch guard recorded as
a conjunct. Each finished path carries its ordered guard conjuncts, the
goals it passes (with the conjunct/read prefix live at that moment),
and the dynamic input reads it performed. reach_goal then solves the
guard prefix for a chosen goal and validates the resulting inputs by
replaying them on the concrete interpreter before emitting a witness;
a replay that misses the goal is discarded and counted as an internal
error, never returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import islice, product

from .executor import Executor, TestCase
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
    FunctionDef,
    If,
    InputRead,
    Label,
    Program,
    Return,
    Unary,
    Var,
    While,
)
from .instrument import KIND_ERROR, GoalTable
from .intops import domain
from .solver import (
    INCOMPLETE,
    SAT,
    PathCondition,
    SolveResult,
    solve,
)
from .terms import TConst, TVar, Term, mk_bin, mk_clamp, mk_un, to_prefix

DEFAULT_PATH_CAP = 4096
MAX_DOMAIN_COMBOS = 32  # window combinations tried per path prefix

STRATEGY_FIXED = "fixed"
STRATEGY_INCR = "incr"
STRATEGY_FALSI = "falsi"
STRATEGY_KINDUCTION = "kinduction"
STRATEGIES = (STRATEGY_KINDUCTION, STRATEGY_FALSI, STRATEGY_INCR, STRATEGY_FIXED)

REACH_WITNESS = "witness"
REACH_UNSAT = "unsat-at-bound"
REACH_BUDGET = "budget-exhausted"
REACH_PATH_CAP = "path-cap"
REACH_SKIPPED = "skipped"


@dataclass
class BmcConfig:
    strategy: str = STRATEGY_INCR
    k: int = 8              # bound used by the fixed strategy
    k_max: int = 16         # ceiling for incremental schedules
    domain_bound: int = 4096
    path_cap: int = DEFAULT_PATH_CAP
    probe_budget: int = 200_000
    solve_cap: int = 64     # solver invocations allowed per goal

    def schedule(self) -> list[int]:
        if self.strategy == STRATEGY_FIXED:
            return [self.k]
        ks = []
        k = 1
        while k < self.k_max:
            ks.append(k)
            k *= 2
        ks.append(self.k_max)
        return ks


@dataclass
class SymPath:
    conjuncts: list[tuple[Term, bool]]
    goals: list[tuple[int, int, int]]  # (goal id, conjunct count, read count) at the hit
    reads: list[tuple[int, int, int, bool]]  # (var index, site, width, signed)

    def var_types(self) -> dict[int, tuple[int, bool]]:
        return {idx: (w, s) for idx, _, w, s in self.reads}


@dataclass
class UnrollResult:
    paths: list[SymPath]
    incomplete: bool  # the path cap cut enumeration short


class _Stop(Exception):
    pass


@dataclass
class _St:
    conj: list[tuple[Term, bool]] = field(default_factory=list)
    goals: list[tuple[int, int, int]] = field(default_factory=list)
    reads: list[tuple[int, int, int, bool]] = field(default_factory=list)
    nvars: int = 0

    def copy(self) -> "_St":
        return _St(self.conj[:], self.goals[:], self.reads[:], self.nvars)


_FALSE = TConst(32, True, 0)


class _Unroller:
    def __init__(self, program: Program, k: int, path_cap: int):
        self.fns = {f.name: f for f in program.functions}
        self.entry = self.fns[program.entry]
        self.k = k
        self.cap = path_cap
        self.paths: list[SymPath] = []
        self.incomplete = False

    def run(self) -> UnrollResult:
        try:
            for _kind, _term, _env, st in self._stmts(self.entry.body, 0, {}, _St(), self.entry):
                self._record(st)
        except _Stop:
            self.incomplete = True
        return UnrollResult(self.paths, self.incomplete)

    def _record(self, st: _St) -> None:
        if len(self.paths) >= self.cap:
            raise _Stop()
        self.paths.append(SymPath(st.conj, st.goals, st.reads))

    # expression evaluation; mutates st with reads and division guards

    def _eval(self, e, env: dict[int, Term], st: _St) -> Term:
        if isinstance(e, Const):
            return TConst(e.ty.width, e.ty.signed, e.value)
        if isinstance(e, Var):
            return env[e.slot]
        if isinstance(e, InputRead):
            t = TVar(e.ty.width, e.ty.signed, st.nvars, e.site)
            st.reads.append((st.nvars, e.site, e.ty.width, e.ty.signed))
            st.nvars += 1
            return t
        if isinstance(e, Unary):
            return mk_un(e.op, self._eval(e.operand, env, st), e.ty.width, e.ty.signed)
        if isinstance(e, Clamp):
            a = self._eval(e.operand, env, st)
            return mk_clamp(a, e.lo, e.hi, e.ty.width, e.ty.signed)
        if isinstance(e, Binary):
            a = self._eval(e.left, env, st)
            b = self._eval(e.right, env, st)
            if e.op in ("/", "%"):
                if isinstance(b, TConst):
                    if b.value == 0:
                        st.conj.append((_FALSE, True))
                else:
                    zero = TConst(b.width, b.signed, 0)
                    st.conj.append((mk_bin("!=", b, zero, 32, True), True))
            return mk_bin(e.op, a, b, e.ty.width, e.ty.signed)
        raise AssertionError(f"unhandled expression {type(e).__name__}")

    # condition contexts fork on logical structure so short-circuited
    # operands contribute guards only on the paths that evaluate them

    def _cond_forks(self, e, env: dict[int, Term], st: _St):
        if isinstance(e, Unary) and e.op == "!":
            for st1, truthy in self._cond_forks(e.operand, env, st):
                yield st1, not truthy
            return
        if isinstance(e, Binary) and e.op in ("&&", "||"):
            keep = e.op == "&&"
            for st1, ta in self._cond_forks(e.left, env, st):
                if ta == keep:
                    yield from self._cond_forks(e.right, env, st1)
                else:
                    yield st1, ta
            return
        t = self._eval(e, env, st)
        if isinstance(t, TConst):
            yield st, t.value != 0
            return
        st_t = st.copy()
        st_t.conj.append((t, True))
        yield st_t, True
        st_f = st
        st_f.conj.append((t, False))
        yield st_f, False

    # statement walk; completions are (kind, term, env, st) with kind in
    # {"fall", "return", "end"}

    def _stmts(self, stmts: list, i: int, env: dict[int, Term], st: _St, fn: FunctionDef):
        while i < len(stmts):
            s = stmts[i]
            if isinstance(s, Label):
                st.goals.append((s.goal_id, len(st.conj), st.nvars))
                i += 1
                continue
            if isinstance(s, Decl) or isinstance(s, Assign):
                value = s.init if isinstance(s, Decl) else s.value
                if isinstance(value, Call):
                    args_st = st
                    for kind, term, _cenv, st2 in self._call(value, env, args_st):
                        if kind != "return":
                            yield kind, term, None, st2
                            continue
                        env2 = dict(env)
                        env2[s.slot] = term
                        yield from self._stmts(stmts, i + 1, env2, st2, fn)
                    return
                env[s.slot] = self._eval(value, env, st)
                i += 1
                continue
            if isinstance(s, CallStmt):
                for kind, term, _cenv, st2 in self._call(s.call, env, st):
                    if kind != "return":
                        yield kind, term, None, st2
                        continue
                    yield from self._stmts(stmts, i + 1, dict(env), st2, fn)
                return
            if isinstance(s, If):
                for st1, truthy in self._cond_forks(s.cond, env, st):
                    branch = s.then if truthy else (s.els or [])
                    for kind, term, env2, st2 in self._stmts(branch, 0, dict(env), st1, fn):
                        if kind == "fall":
                            yield from self._stmts(stmts, i + 1, env2, st2, fn)
                        else:
                            yield kind, term, env2, st2
                return
            if isinstance(s, While):
                for kind, term, env2, st2 in self._loop(s, self.k, env, st, fn):
                    if kind == "fall":
                        yield from self._stmts(stmts, i + 1, env2, st2, fn)
                    else:
                        yield kind, term, env2, st2
                return
            if isinstance(s, Assert):
                for st1, truthy in self._cond_forks(s.cond, env, st):
                    if truthy:
                        yield from self._stmts(stmts, i + 1, dict(env), st1, fn)
                    else:
                        st1.goals.append((s.goal_id, len(st1.conj), st1.nvars))
                        yield "end", None, None, st1
                return
            if isinstance(s, ErrorReach):
                yield "end", None, None, st
                return
            if isinstance(s, Return):
                t = self._eval(s.value, env, st)
                yield "return", t, None, st
                return
            raise AssertionError(f"unhandled statement {type(s).__name__}")
        yield "fall", None, env, st

    def _loop(self, s: While, remaining: int, env: dict[int, Term], st: _St, fn: FunctionDef):
        forks = list(self._cond_forks(s.cond, env, st))
        # exits first keeps shallow paths ahead of deep ones under the cap
        for st1, truthy in [f for f in forks if not f[1]] + [f for f in forks if f[1]]:
            if not truthy:
                yield "fall", None, dict(env), st1
                continue
            if remaining == 0:
                continue  # would need more iterations than the bound allows
            for kind, term, env2, st2 in self._stmts(s.body, 0, dict(env), st1, fn):
                if kind == "fall":
                    yield from self._loop(s, remaining - 1, env2, st2, fn)
                else:
                    yield kind, term, env2, st2

    def _call(self, call: Call, env: dict[int, Term], st: _St):
        callee = self.fns[call.name]
        args = [self._eval(a, env, st) for a in call.args]
        cenv = {p.slot: t for p, t in zip(callee.params, args)}
        for kind, term, env2, st2 in self._stmts(callee.body, 0, cenv, st, callee):
            assert kind != "fall", "function body must end in a terminator"
            yield kind, term, env2, st2


def unroll(program: Program, k: int, path_cap: int = DEFAULT_PATH_CAP) -> UnrollResult:
    """Enumerate acyclic paths with loops expanded at most k times."""
    return _Unroller(program, k, path_cap).run()


def dump_paths(result: UnrollResult) -> str:
    """Deterministic text listing of every path's guards and goal hits."""
    out = []
    for n, p in enumerate(result.paths):
        out.append(f"path {n} reads={len(p.reads)} goals={[g for g, _, _ in p.goals]}")
        for t, want in p.conjuncts:
            out.append(f"  {'assume' if want else 'refute'} {to_prefix(t)}")
    if result.incomplete:
        out.append("enumeration truncated at path cap")
    return "\n".join(out) + "\n"


@dataclass
class Witness:
    testcase: TestCase
    goal: int
    k_used: int
    trace: object = None  # validation run, reusable by the caller


@dataclass
class ReachResult:
    status: str
    witness: Witness | None = None
    solves: int = 0
    replays: int = 0


class BmcEngine:
    """Per-program engine: caches unrollings across goals and validates
    every witness by concrete replay before handing it out."""

    def __init__(
        self,
        program: Program,
        table: GoalTable,
        executor: Executor,
        cfg: BmcConfig,
        input_domain: tuple[int, int] | None = None,
    ):
        self.program = program
        self.table = table
        self.executor = executor
        self.cfg = cfg
        self.input_domain = input_domain
        self.hard_errors = 0
        self._unrolls: dict[int, UnrollResult] = {}
        self._boxes: dict[tuple[int, bool], list[tuple[int, int]]] = {}
        self._effective = (
            STRATEGY_INCR if cfg.strategy == STRATEGY_KINDUCTION else cfg.strategy
        )

    def allows(self, goal_id: int) -> bool:
        if self._effective == STRATEGY_FALSI:
            return self.table.goal(goal_id).kind == KIND_ERROR
        return True

    def _unroll(self, k: int) -> UnrollResult:
        res = self._unrolls.get(k)
        if res is None:
            res = unroll(self.program, k, self.cfg.path_cap)
            self._unrolls[k] = res
        return res

    def _value_boxes(self, width: int, signed: bool) -> list[tuple[int, int]]:
        """Value-space intervals reachable from raw inputs inside the campaign
        domain. Raw values reduce modulo 2**width, so a domain of small
        negatives also reaches the top of an unsigned range; the image of the
        raw interval is a union of congruence windows, not one interval."""
        boxes = self._boxes.get((width, signed))
        if boxes is not None:
            return boxes
        tlo, thi = domain(width, signed)
        if not self.input_domain:
            boxes = [(tlo, thi)]
        else:
            ilo, ihi = self.input_domain
            period = 1 << width
            if ihi - ilo + 1 >= period:
                boxes = [(tlo, thi)]
            else:
                boxes = []
                k_min = -((ihi - tlo) // period)
                k_max = (thi - ilo) // period
                for k in range(k_min, k_max + 1):
                    lo = max(tlo, ilo + k * period)
                    hi = min(thi, ihi + k * period)
                    if lo <= hi:
                        boxes.append((lo, hi))
        self._boxes[(width, signed)] = boxes
        return boxes

    def _fit_domain(self, value: int, width: int) -> int:
        """Raw representative of value's bit pattern inside the campaign
        domain, or value itself when none exists."""
        if not self.input_domain:
            return value
        ilo, ihi = self.input_domain
        period = 1 << width
        raw = value + period * -((value - ilo) // period)
        return raw if raw <= ihi else value

    def _default_value(self, width: int, signed: bool) -> int:
        boxes = self._value_boxes(width, signed)
        for lo, hi in boxes:
            if lo <= 0 <= hi:
                return self._fit_domain(0, width)
        return self._fit_domain(boxes[0][0], width)

    def _assemble(self, path: SymPath, n_reads: int, assignment: dict[int, int]) -> list[int]:
        inputs = []
        for idx, _site, width, signed in path.reads[:n_reads]:
            if idx in assignment:
                inputs.append(self._fit_domain(assignment[idx], width))
            else:
                inputs.append(self._default_value(width, signed))
        return inputs

    def reach_goal(self, goal_id: int) -> ReachResult:
        if not self.allows(goal_id):
            return ReachResult(REACH_SKIPPED)
        solves = 0
        replays = 0
        solver_short = False
        path_capped = False
        seen_prefixes: set[tuple] = set()
        for k in self.cfg.schedule():
            res = self._unroll(k)
            path_capped = path_capped or res.incomplete
            for path in res.paths:
                hit = next((h for h in path.goals if h[0] == goal_id), None)
                if hit is None:
                    continue
                _gid, n_conj, n_reads = hit
                conjuncts = path.conjuncts[:n_conj]
                key = tuple(conjuncts)
                if key in seen_prefixes:
                    continue
                seen_prefixes.add(key)
                if any(isinstance(t, TConst) and (t.value != 0) != want for t, want in conjuncts):
                    continue  # statically contradictory path
                pc = PathCondition(conjuncts)
                types = path.var_types()
                combos, capped = self._domain_combos(pc, types)
                solver_short = solver_short or capped
                for initial in combos:
                    if solves >= self.cfg.solve_cap:
                        return ReachResult(REACH_BUDGET, None, solves, replays)
                    solves += 1
                    r: SolveResult = solve(
                        pc,
                        types,
                        self.cfg.domain_bound,
                        initial_domains=initial,
                        probe_budget=self.cfg.probe_budget,
                    )
                    if r.status == INCOMPLETE:
                        solver_short = True
                        continue
                    if r.status != SAT:
                        continue
                    tc = TestCase(self._assemble(path, n_reads, r.assignment), origin="bmc")
                    replays += 1
                    trace = self.executor.run(tc)
                    if goal_id in trace.covered_set:
                        return ReachResult(
                            REACH_WITNESS, Witness(tc, goal_id, k, trace), solves, replays
                        )
                    self.hard_errors += 1
        if solver_short:
            return ReachResult(REACH_BUDGET, None, solves, replays)
        if path_capped:
            return ReachResult(REACH_PATH_CAP, None, solves, replays)
        return ReachResult(REACH_UNSAT, None, solves, replays)

    def _domain_combos(self, pc: PathCondition, types: dict[int, tuple[int, bool]]):
        """Initial-domain dicts to try for one path prefix. Without a campaign
        domain a single unrestricted solve suffices; with one, every
        combination of the constrained variables' congruence windows is tried
        so solutions in either window are found. Returns (combos, capped)."""
        if not self.input_domain:
            return (None,), False
        lists = [
            [(i, box) for box in self._value_boxes(*types[i])] for i in pc.variables()
        ]
        total = 1
        for options in lists:
            total *= len(options)
        combos = (dict(c) for c in product(*lists))
        if total > MAX_DOMAIN_COMBOS:
            return islice(combos, MAX_DOMAIN_COMBOS), True
        return combos, False
