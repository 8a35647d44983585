"""Path-condition solver: interval propagation plus bounded enumeration.

A path condition is a conjunction of (term, want_truthy) pairs. The
solver first narrows per-variable intervals by propagating conjuncts to
a fixpoint, then backtracks over candidate values probed in the order
{interval endpoints, 0, +-1, outward sweep}, at most domain_bound probes
per variable. Interval reasoning is conservative: a node whose exact
(unbounded) interval would leave the representable range of its width
is widened to the full range and never refined through, so wrapping can
hide solutions from propagation but never lets it report a false unsat.
Every assignment returned has been checked by direct evaluation of all
conjuncts under wrapping semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

from .intops import COMPARISON_OPS, EvalTrap, domain, from_value
from .terms import Term, TBin, TClamp, TConst, TUn, TVar, eval_term, term_vars, to_prefix

SAT = "sat"
UNSAT = "unsat"
INCOMPLETE = "incomplete"

DEFAULT_DOMAIN_BOUND = 4096
DEFAULT_PROBE_BUDGET = 200_000

_NEGATE_CMP = {"==": "!=", "!=": "==", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}
_PROP_ROUNDS = 16


@dataclass
class PathCondition:
    """Ordered conjunction; each entry must evaluate truthy (True) or
    falsy (False)."""

    conjuncts: list[tuple[Term, bool]] = field(default_factory=list)

    def variables(self) -> list[int]:
        seen: set[int] = set()
        for t, _ in self.conjuncts:
            term_vars(t, seen)
        return sorted(seen)

    def dump(self) -> str:
        lines = []
        for t, want in self.conjuncts:
            tag = "assume" if want else "refute"
            lines.append(f"{tag} {to_prefix(t)}")
        return "\n".join(lines) + ("\n" if lines else "")


class _Infeasible(Exception):
    pass


def _full(width: int, signed: bool) -> tuple[int, int]:
    return domain(width, signed)


def _fits(lo: int, hi: int, width: int, signed: bool) -> bool:
    dlo, dhi = domain(width, signed)
    return dlo <= lo and hi <= dhi


def _fwd(t: Term, doms: dict[int, tuple[int, int]], hyp: bool = False) -> tuple[int, int, bool]:
    """Forward interval of t. Third element: interval is exact enough to
    refine through (no wrapping possible inside this node)."""
    if isinstance(t, TConst):
        return t.value, t.value, True
    if isinstance(t, TVar):
        lo, hi = doms[t.index]
        return lo, hi, True
    full = _full(t.width, t.signed)
    if isinstance(t, TClamp):
        alo, ahi, _ = _fwd(t.a, doms, hyp)
        lo = min(max(alo, t.lo), t.hi)
        hi = min(max(ahi, t.lo), t.hi)
        return lo, hi, True
    if isinstance(t, TUn):
        alo, ahi, aex = _fwd(t.a, doms, hyp)
        if t.op == "!":
            return 0, 1, True
        if not aex:
            return full[0], full[1], False
        if t.op == "-":
            lo, hi = -ahi, -alo
        else:  # ~x is -x-1 signed, mask-x unsigned
            if t.a.signed:
                lo, hi = -ahi - 1, -alo - 1
            else:
                mask = domain(t.a.width, False)[1]
                lo, hi = mask - ahi, mask - alo
        if hyp or _fits(lo, hi, t.width, t.signed):
            return lo, hi, True
        return full[0], full[1], False
    assert isinstance(t, TBin)
    if t.op in COMPARISON_OPS or t.op in ("&&", "||"):
        return 0, 1, True
    alo, ahi, aex = _fwd(t.a, doms, hyp)
    blo, bhi, bex = _fwd(t.b, doms, hyp)
    if aex and bex:
        if t.op == "+":
            lo, hi = alo + blo, ahi + bhi
        elif t.op == "-":
            lo, hi = alo - bhi, ahi - blo
        elif t.op == "*":
            prods = (alo * blo, alo * bhi, ahi * blo, ahi * bhi)
            lo, hi = min(prods), max(prods)
        elif t.op == "/" and (blo > 0 or bhi < 0):
            quots = []
            for x in (alo, ahi):
                for y in (blo, bhi):
                    q = abs(x) // abs(y)
                    quots.append(-q if (x < 0) != (y < 0) else q)
            lo, hi = min(quots), max(quots)
        else:
            return full[0], full[1], False
        if hyp or _fits(lo, hi, t.width, t.signed):
            return lo, hi, True
    return full[0], full[1], False


def _intersect(idx: int, lo: int, hi: int, doms: dict[int, tuple[int, int]]) -> bool:
    clo, chi = doms[idx]
    nlo, nhi = max(clo, lo), min(chi, hi)
    if nlo > nhi:
        raise _Infeasible()
    if (nlo, nhi) != (clo, chi):
        doms[idx] = (nlo, nhi)
        return True
    return False


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _refine(t: Term, wlo: int, whi: int, doms: dict[int, tuple[int, int]], hyp: bool = False) -> bool:
    """Narrow variable domains given t's value lies in [wlo, whi].
    Returns True if any domain changed; raises _Infeasible on an empty
    intersection. Only descends through nodes whose forward interval is
    exact, so wrapping never produces an unsound cut."""
    if isinstance(t, TConst):
        if not (wlo <= t.value <= whi):
            raise _Infeasible()
        return False
    if isinstance(t, TVar):
        return _intersect(t.index, wlo, whi, doms)
    if isinstance(t, TClamp):
        if whi < t.lo or wlo > t.hi:
            raise _Infeasible()
        dlo, dhi = _full(t.a.width, t.a.signed)
        nlo = wlo if wlo > t.lo else dlo
        nhi = whi if whi < t.hi else dhi
        return _refine(t.a, nlo, nhi, doms, hyp)
    if isinstance(t, TUn):
        if t.op == "!":
            return False
        if not _fwd(t, doms, hyp)[2]:
            return False
        if t.op == "-":
            return _refine(t.a, -whi, -wlo, doms, hyp)
        if t.a.signed:
            return _refine(t.a, -whi - 1, -wlo - 1, doms, hyp)
        mask = domain(t.a.width, False)[1]
        return _refine(t.a, mask - whi, mask - wlo, doms, hyp)
    assert isinstance(t, TBin)
    if t.op in COMPARISON_OPS:
        return _refine_cmp(t, wlo, whi, doms, hyp)
    if t.op in ("&&", "||"):
        if wlo == whi == 0:
            if t.op == "||":  # both operands falsy
                c1 = _refine_truthiness(t.a, False, doms, hyp)
                c2 = _refine_truthiness(t.b, False, doms, hyp)
                return c1 or c2
            return False
        if wlo >= 1 and t.op == "&&":  # both operands truthy
            c1 = _refine_truthiness(t.a, True, doms, hyp)
            c2 = _refine_truthiness(t.b, True, doms, hyp)
            return c1 or c2
        return False
    if not _fwd(t, doms, hyp)[2]:
        return False  # node could wrap; cutting through it would be unsound
    blo, bhi, _ = _fwd(t.b, doms, hyp)
    changed = False
    if t.op == "+":
        changed |= _refine(t.a, wlo - bhi, whi - blo, doms, hyp)
        alo, ahi, _ = _fwd(t.a, doms, hyp)
        changed |= _refine(t.b, wlo - ahi, whi - alo, doms, hyp)
        return changed
    if t.op == "-":
        changed |= _refine(t.a, wlo + blo, whi + bhi, doms, hyp)
        alo, ahi, _ = _fwd(t.a, doms, hyp)
        changed |= _refine(t.b, alo - whi, ahi - wlo, doms, hyp)
        return changed
    if t.op == "*":
        if isinstance(t.a, TVar) and isinstance(t.b, TVar) and t.a.index == t.b.index:
            # square: x*x in [wlo, whi]
            if whi < 0:
                raise _Infeasible()
            r = isqrt(whi)
            if t.a.signed:
                return _refine(t.a, -r, r, doms, hyp)
            return _refine(t.a, 0, r, doms, hyp)
        changed |= _refine_mul_side(t.a, blo, bhi, wlo, whi, doms, hyp)
        changed |= _refine_mul_side(t.b, *_fwd(t.a, doms, hyp)[:2], wlo, whi, doms, hyp)
        return changed
    return False


def _div_interval(
    wlo: int, whi: int, olo: int, ohi: int
) -> tuple[int, int] | None:
    """Outer bound of {a : some b in [olo, ohi] has a*b in [wlo, whi]}.

    Requires a divisor interval that excludes zero; bounds come from the
    monotonicity of a |-> a*b at the divisor endpoints."""
    if olo <= 0 <= ohi:
        return None
    if ohi < 0:
        return _div_interval(-whi, -wlo, -ohi, -olo)
    lo = _ceil_div(wlo, ohi) if wlo >= 0 else _ceil_div(wlo, olo)
    hi = whi // olo if whi >= 0 else whi // ohi
    return lo, hi


def _refine_mul_side(
    side: Term,
    olo: int,
    ohi: int,
    wlo: int,
    whi: int,
    doms: dict[int, tuple[int, int]],
    hyp: bool = False,
) -> bool:
    """side * other in [wlo, whi] with other in [olo, ohi]."""
    bounds = _div_interval(wlo, whi, olo, ohi)
    if bounds is None:
        return False
    lo, hi = bounds
    if lo > hi:
        raise _Infeasible()
    return _refine(side, lo, hi, doms, hyp)


def _refine_cmp(t: TBin, wlo: int, whi: int, doms: dict[int, tuple[int, int]], hyp: bool = False) -> bool:
    if wlo == whi == 0:
        flipped = TBin(t.width, t.signed, _NEGATE_CMP[t.op], t.a, t.b)
        return _refine_cmp(flipped, 1, 1, doms, hyp)
    if wlo < 1:
        return False  # could be either outcome
    op = t.op
    a, b = t.a, t.b
    if op in (">", ">="):
        a, b = b, a
        op = "<" if op == ">" else "<="
    alo, ahi, aex = _fwd(a, doms, hyp)
    blo, bhi, bex = _fwd(b, doms, hyp)
    changed = False
    if op == "==":
        if aex:
            changed |= _refine(a, blo, bhi, doms, hyp)
        if bex:
            changed |= _refine(b, alo, ahi, doms, hyp)
        return changed
    if op == "!=":
        if aex and bex and blo == bhi:
            if alo == blo == ahi:
                raise _Infeasible()
            if alo == blo:
                changed |= _refine(a, alo + 1, ahi, doms, hyp)
            elif ahi == blo:
                changed |= _refine(a, alo, ahi - 1, doms, hyp)
        if aex and bex and alo == ahi:
            if blo == alo == bhi:
                raise _Infeasible()
            if blo == alo:
                changed |= _refine(b, blo + 1, bhi, doms, hyp)
            elif bhi == alo:
                changed |= _refine(b, blo, bhi - 1, doms, hyp)
        return changed
    if op == "<":
        if aex:
            changed |= _refine(a, alo, bhi - 1, doms, hyp)
        if bex:
            changed |= _refine(b, alo + 1, bhi, doms, hyp)
        return changed
    assert op == "<="
    if aex:
        changed |= _refine(a, alo, bhi, doms, hyp)
    if bex:
        changed |= _refine(b, alo, bhi, doms, hyp)
    return changed


def _refine_truthiness(t: Term, want: bool, doms: dict[int, tuple[int, int]], hyp: bool = False) -> bool:
    if isinstance(t, TUn) and t.op == "!":
        return _refine_truthiness(t.a, not want, doms, hyp)
    if isinstance(t, TBin) and (t.op in COMPARISON_OPS or t.op in ("&&", "||")):
        if want:
            return _refine(t, 1, 1, doms, hyp)
        return _refine(t, 0, 0, doms, hyp)
    if not want:
        return _refine(t, 0, 0, doms, hyp)
    # truthy arbitrary term: shave a zero endpoint
    lo, hi, ex = _fwd(t, doms, hyp)
    if not ex:
        return False
    if lo == hi == 0:
        raise _Infeasible()
    if lo == 0:
        return _refine(t, 1, hi, doms, hyp)
    if hi == 0:
        return _refine(t, lo, -1, doms, hyp)
    return False


def propagate(pc: PathCondition, doms: dict[int, tuple[int, int]], hyp: bool = False) -> bool:
    """Narrow doms in place to a fixpoint. Returns False when some
    conjunct is unsatisfiable over the current intervals. With hyp the
    pass assumes no wrapping occurs; the result is then only a probe
    heuristic, never grounds for an unsat verdict."""
    try:
        for _ in range(_PROP_ROUNDS):
            changed = False
            for t, want in pc.conjuncts:
                changed |= _refine_truthiness(t, want, doms, hyp)
            if not changed:
                return True
        return True
    except _Infeasible:
        return False


def _candidates(lo: int, hi: int, bound: int, prefix: tuple[int, ...] = ()):
    """Probe order: suggested values first, then interval endpoints, 0,
    +-1, then a sweep outward from zero. Yields at most `bound` distinct
    in-range values."""
    seen: set[int] = set()
    emitted = 0

    def accept(v: int) -> bool:
        return lo <= v <= hi and v not in seen

    stream = list(prefix) + [lo, hi, 0, 1, -1]
    mag = 2
    if lo > 2:
        mag = lo
    elif hi < -2:
        mag = -hi
    width = hi - lo + 1
    maxabs = max(abs(lo), abs(hi))
    while True:
        for v in stream:
            if accept(v):
                seen.add(v)
                emitted += 1
                yield v
                if emitted >= bound:
                    return
        if len(seen) >= width:
            return
        if mag > maxabs:
            return
        stream = [mag, -mag]
        mag += 1


@dataclass
class SolveResult:
    status: str
    assignment: dict[int, int] | None = None
    probes: int = 0


def _check_concrete(pc: PathCondition, env: dict[int, int]) -> bool:
    for t, want in pc.conjuncts:
        try:
            p = eval_term(t, env)
        except EvalTrap:
            return False
        if (p != 0) != want:
            return False
    return True


def solve(
    pc: PathCondition,
    var_types: dict[int, tuple[int, bool]],
    domain_bound: int = DEFAULT_DOMAIN_BOUND,
    initial_domains: dict[int, tuple[int, int]] | None = None,
    probe_budget: int = DEFAULT_PROBE_BUDGET,
) -> SolveResult:
    """Search for an assignment satisfying pc. var_types gives (width,
    signed) per variable index; initial_domains optionally narrows the
    starting intervals (e.g. a campaign-wide input domain)."""
    doms: dict[int, tuple[int, int]] = {}
    for idx in pc.variables():
        width, signed = var_types[idx]
        lo, hi = domain(width, signed)
        if initial_domains and idx in initial_domains:
            ilo, ihi = initial_domains[idx]
            lo, hi = max(lo, ilo), min(hi, ihi)
            if lo > hi:
                return SolveResult(UNSAT)
        doms[idx] = (lo, hi)
    # constant-only conjuncts may already be contradictory
    if not doms:
        if _check_concrete(pc, {}):
            return SolveResult(SAT, {})
        return SolveResult(UNSAT)
    if not propagate(pc, doms):
        return SolveResult(UNSAT)

    # A second pass under a no-wrap hypothesis often pins variables that
    # sound propagation must leave wide; its intervals are only used to
    # pick probe values, which the concrete check later validates.
    suggestions: dict[int, tuple[int, ...]] = {}
    hyp_doms = dict(doms)
    if propagate(pc, hyp_doms, hyp=True):
        for idx, (hlo, hhi) in hyp_doms.items():
            if (hlo, hhi) == doms[idx]:
                continue
            vals = [hlo, hhi] if hhi - hlo > 15 else list(range(hlo, hhi + 1))
            suggestions[idx] = tuple(vals)

    order = sorted(doms, key=lambda i: (doms[i][1] - doms[i][0], i))
    state = {"probes": 0, "truncated": False}

    def search(pos: int, cur: dict[int, tuple[int, int]], env: dict[int, int]):
        if pos == len(order):
            return dict(env) if _check_concrete(pc, env) else None
        idx = order[pos]
        lo, hi = cur[idx]
        produced = 0
        for v in _candidates(lo, hi, domain_bound, suggestions.get(idx, ())):
            produced += 1
            if state["probes"] >= probe_budget:
                state["truncated"] = True
                return None
            state["probes"] += 1
            nxt = dict(cur)
            nxt[idx] = (v, v)
            if not propagate(pc, nxt):
                continue
            env[idx] = v
            found = search(pos + 1, nxt, env)
            if found is not None:
                return found
            del env[idx]
        if produced < hi - lo + 1 and produced >= domain_bound:
            state["truncated"] = True
        return None

    found = search(0, doms, {})
    if found is not None:
        return SolveResult(SAT, found, state["probes"])
    return SolveResult(INCOMPLETE if state["truncated"] else UNSAT, None, state["probes"])
