"""Grey-box mutation fuzzer and the interval-guided selective generator.

Mutation works on input vectors, not raw bytes: each position answers
one dynamic input read, so positional edits keep their meaning across
runs. Widths come from the seed's recorded read sites when available.
"""

from __future__ import annotations

import random

from .executor import Executor, ExecutionTrace, TestCase
from .instrument import InputConstraints
from .intops import domain, from_value, to_value

OP_BIT_FLIP = "bit-flip"
OP_BYTE_FLIP = "byte-flip"
OP_ARITH = "arith"
OP_INTERESTING = "interesting"
OP_SPLICE = "splice"
OP_TRUNCATE = "truncate"
OP_EXTEND = "extend"

MUTATION_OPS = (
    OP_BIT_FLIP,
    OP_BYTE_FLIP,
    OP_ARITH,
    OP_INTERESTING,
    OP_SPLICE,
    OP_TRUNCATE,
    OP_EXTEND,
)

ARITH_MAX_DELTA = 35


def _site_for(pos: int, trace: ExecutionTrace | None, sites) -> tuple[int, bool, int]:
    """(width, signed, site id) feeding input position pos, best effort:
    the seed's recorded reads first, then static site order."""
    if trace is not None and pos < len(trace.sites):
        sid = trace.sites[pos]
        if 0 <= sid < len(sites):
            s = sites[sid]
            return s.width, s.signed, s.id
    if sites:
        s = sites[pos % len(sites)]
        return s.width, s.signed, s.id
    return 32, True, -1


def _wrap(v: int, width: int, signed: bool) -> int:
    return to_value(from_value(v, width), width, signed)


def _draw_range(
    site_id: int,
    width: int,
    signed: bool,
    constraints: InputConstraints | None,
    input_domain: tuple[int, int] | None,
) -> tuple[int, int]:
    lo, hi = domain(width, signed)
    if constraints is not None and site_id >= 0:
        ilo, ihi = constraints.interval(site_id)
        lo, hi = max(lo, ilo), min(hi, ihi)
    if input_domain is not None:
        lo, hi = max(lo, input_domain[0]), min(hi, input_domain[1])
    if lo > hi:
        lo, hi = domain(width, signed)
    return lo, hi


def mutate(
    seed: TestCase,
    op: str,
    rng: random.Random,
    *,
    sites=(),
    trace: ExecutionTrace | None = None,
    constraints: InputConstraints | None = None,
    partner: TestCase | None = None,
    input_domain: tuple[int, int] | None = None,
) -> TestCase:
    """One mutation of the seed's input vector. Operators that need a
    position fall back to extend on an empty vector."""
    inputs = list(seed.inputs)
    if op in (OP_BIT_FLIP, OP_BYTE_FLIP, OP_ARITH, OP_INTERESTING, OP_TRUNCATE) and not inputs:
        op = OP_EXTEND

    if op == OP_SPLICE:
        other = list(partner.inputs) if partner is not None else []
        if not inputs or not other:
            op = OP_EXTEND
        else:
            cut = rng.randrange(1, len(inputs) + 1)
            return TestCase(inputs[:cut] + other[cut:], origin="fuzzer")

    if op == OP_EXTEND:
        pos = len(inputs)
        width, signed, sid = _site_for(pos, trace, sites)
        lo, hi = _draw_range(sid, width, signed, constraints, input_domain)
        inputs.append(rng.randint(lo, hi))
        return TestCase(inputs, origin="fuzzer")

    if op == OP_TRUNCATE:
        return TestCase(inputs[: rng.randrange(len(inputs))], origin="fuzzer")

    pos = rng.randrange(len(inputs))
    width, signed, sid = _site_for(pos, trace, sites)
    v = inputs[pos]
    if op == OP_BIT_FLIP:
        v = _wrap(v ^ (1 << rng.randrange(width)), width, signed)
    elif op == OP_BYTE_FLIP:
        v = _wrap(v ^ (0xFF << (8 * rng.randrange(width // 8))), width, signed)
    elif op == OP_ARITH:
        delta = rng.randint(1, ARITH_MAX_DELTA)
        if rng.random() < 0.5:
            delta = -delta
        v = _wrap(v + delta, width, signed)
    else:
        assert op == OP_INTERESTING
        tlo, thi = domain(width, signed)
        pool = [0, 1, -1, tlo, thi]
        if constraints is not None and sid >= 0 and not constraints.is_full(sid):
            ilo, ihi = constraints.interval(sid)
            pool.extend((ilo, ihi))
        v = _wrap(rng.choice(pool), width, signed)
    if input_domain is not None:
        # Campaign-wide domain is a hard contract on every generated value.
        tlo, thi = domain(width, signed)
        lo, hi = max(tlo, input_domain[0]), min(thi, input_domain[1])
        if lo <= hi:
            v = min(max(v, lo), hi)
    inputs[pos] = v
    return TestCase(inputs, origin="fuzzer")


def schedule_energy(corpus, budget: int) -> list[int]:
    """Per-seed trial counts proportional to (1 + unique coverage) times
    (1 + depth), summing exactly to budget with a floor of one trial per
    seed while the budget allows it."""
    n = len(corpus)
    if n == 0:
        raise ValueError("energy schedule needs a non-empty corpus")
    if budget <= n:
        return [1 if i < budget else 0 for i in range(n)]
    weights = [
        (1 + seed.impact.unique_labels) * (1 + max(seed.impact.max_depth, 0))
        for seed in corpus
    ]
    extra = budget - n
    total = sum(weights)
    shares = [extra * w / total for w in weights]
    energies = [1 + int(s) for s in shares]
    rest = budget - sum(energies)
    order = sorted(range(n), key=lambda i: (-(shares[i] - int(shares[i])), i))
    for i in order[:rest]:
        energies[i] += 1
    return energies


def fuzz_round(
    executor: Executor,
    corpus,
    budget: int,
    tracer,
    rng: random.Random,
    constraints: InputConstraints | None = None,
    input_domain: tuple[int, int] | None = None,
) -> list[tuple[TestCase, ExecutionTrace]]:
    """Run exactly `budget` mutated executions, reporting every run to
    the tracer as it happens. Returns the runs that increased coverage."""
    gains: list[tuple[TestCase, ExecutionTrace]] = []
    if budget <= 0:
        return gains
    sites = executor.program.input_sites
    energies = schedule_energy(corpus, budget)
    for seed, energy in zip(corpus, energies):
        for _ in range(energy):
            op = MUTATION_OPS[rng.randrange(len(MUTATION_OPS))]
            partner = corpus[rng.randrange(len(corpus))].tc
            tc = mutate(
                seed.tc,
                op,
                rng,
                sites=sites,
                trace=seed.trace,
                constraints=constraints,
                partner=partner,
                input_domain=input_domain,
            )
            trace = executor.run(tc)
            if tracer.record(tc, trace):
                gains.append((tc, trace))
    return gains


def selective_generate(
    n_inputs: int,
    constraints: InputConstraints | None,
    rng: random.Random,
    sites,
    input_domain: tuple[int, int] | None = None,
) -> TestCase:
    """Draw each input uniformly from its site's inferred interval."""
    inputs = []
    for i in range(n_inputs):
        if sites:
            s = sites[i % len(sites)]
            width, signed, sid = s.width, s.signed, s.id
        else:
            width, signed, sid = 32, True, -1
        lo, hi = _draw_range(sid, width, signed, constraints, input_domain)
        inputs.append(rng.randint(lo, hi))
    return TestCase(inputs, origin="selective")
