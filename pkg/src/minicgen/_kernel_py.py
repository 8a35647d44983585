"""Pure-Python interpreter kernel.

Fallback twin of the compiled kernel in `_kernel.pyx`: same entry point,
same observable results. Values are unsigned 64-bit patterns held in
plain Python ints; the compiled kernel holds them in C uint64, and the
differential test in the suite pins the two to identical traces.
"""

from __future__ import annotations

from .bytecode import (
    B_ADD, B_AND, B_DIV, B_EQ, B_GE, B_GT, B_LE, B_LT, B_MOD, B_MUL, B_NE,
    B_OR, B_SHL, B_SHR, B_SUB, B_XOR,
    OP_ASSERT, OP_BINOP, OP_CALL, OP_CLAMP, OP_ERROR, OP_HALT_BAD, OP_ICONST,
    OP_INPUT, OP_JMP, OP_JNZ, OP_JZ, OP_LABEL_HIT, OP_LOAD, OP_POP, OP_RET,
    OP_STEP, OP_STORE, OP_UNOP,
    OUT_ASSERT, OUT_ERROR, OUT_INTERNAL, OUT_NORMAL, OUT_STEP, OUT_TRAP,
    SITE_TRACE_CAP, U_BNOT, U_LNOT, U_NEG,
)

MASK64 = 0xFFFFFFFFFFFFFFFF

KERNEL_NAME = "pure"


def _sext(x: int, width: int) -> int:
    sign = 1 << (width - 1)
    return (x & ((1 << width) - 1)) - ((x & sign) << 1)


def binop(code: int, x: int, y: int, width: int, signed: int):
    """One arithmetic step over canonical width-wide patterns. Returns the
    result pattern, or None to signal a division trap."""
    m = MASK64 if width == 64 else 0xFFFFFFFF
    if code == B_ADD:
        return (x + y) & m
    if code == B_SUB:
        return (x - y) & m
    if code == B_MUL:
        return (x * y) & m
    if code == B_DIV or code == B_MOD:
        if y == 0:
            return None
        if signed:
            sx, sy = _sext(x, width), _sext(y, width)
            q = abs(sx) // abs(sy)
            if (sx < 0) != (sy < 0):
                q = -q
            return (q & m) if code == B_DIV else ((sx - sy * q) & m)
        return (x // y) if code == B_DIV else (x % y)
    if code == B_EQ:
        return 1 if x == y else 0
    if code == B_NE:
        return 1 if x != y else 0
    if code in (B_LT, B_LE, B_GT, B_GE):
        if signed:
            x, y = _sext(x, width), _sext(y, width)
        if code == B_LT:
            return 1 if x < y else 0
        if code == B_LE:
            return 1 if x <= y else 0
        if code == B_GT:
            return 1 if x > y else 0
        return 1 if x >= y else 0
    if code == B_AND:
        return x & y
    if code == B_OR:
        return x | y
    if code == B_XOR:
        return x ^ y
    if code == B_SHL:
        return (x << (y & (width - 1))) & m
    if code == B_SHR:
        if signed:
            return (_sext(x, width) >> (y & (width - 1))) & m
        return x >> (y & (width - 1))
    raise AssertionError(f"bad binop code {code}")


def run_kernel(
    ops, aa, bb, cc,
    entry_pc: int,
    main_frame: int,
    inputs,
    n_inputs: int,
    step_limit: int,
    n_goals: int,
    locals_size: int,
    stack_size: int,
    covered_out,
    sites_out,
    seen,
):
    """Execute bytecode; identical contract to the compiled kernel.

    Returns (outcome, detail, steps, n_covered, n_sites, consumed,
    exhausted, exit_s64, trap_pc). covered_out/sites_out/seen are caller
    supplied arrays (seen must be zeroed)."""
    stack = [0] * stack_size
    locals_ = [0] * locals_size
    ret_pc = [0] * 130
    ret_fp = [0] * 130
    ret_lp = [0] * 130
    sp = 0
    fp = 0
    lp = main_frame
    depth = 0
    pc = entry_pc
    steps = 0
    consumed = 0
    exhausted = 0
    n_covered = 0
    n_sites = 0

    while True:
        op = ops[pc]
        if op == OP_STEP:
            steps += 1
            if steps > step_limit:
                return (OUT_STEP, 0, steps - 1, n_covered, n_sites,
                        consumed, exhausted, 0, pc)
            pc += 1
        elif op == OP_ICONST:
            stack[sp] = aa[pc] & MASK64
            sp += 1
            pc += 1
        elif op == OP_LOAD:
            stack[sp] = locals_[fp + aa[pc]]
            sp += 1
            pc += 1
        elif op == OP_STORE:
            sp -= 1
            locals_[fp + aa[pc]] = stack[sp]
            pc += 1
        elif op == OP_INPUT:
            if consumed < n_inputs:
                raw = inputs[consumed] & MASK64
            else:
                raw = 0
                exhausted = 1
            if n_sites < SITE_TRACE_CAP:
                sites_out[n_sites] = aa[pc]
                n_sites += 1
            consumed += 1
            width = bb[pc]
            stack[sp] = raw & (MASK64 if width == 64 else 0xFFFFFFFF)
            sp += 1
            pc += 1
        elif op == OP_CLAMP:
            packed = cc[pc]
            width = packed & 0xFF
            signed = packed >> 8
            x = stack[sp - 1]
            lo = aa[pc] & MASK64
            hi = bb[pc] & MASK64
            if signed:
                xs = _sext(x, width)
                if xs < _sext(lo, width):
                    stack[sp - 1] = lo
                elif xs > _sext(hi, width):
                    stack[sp - 1] = hi
            else:
                if x < lo:
                    stack[sp - 1] = lo
                elif x > hi:
                    stack[sp - 1] = hi
            pc += 1
        elif op == OP_BINOP:
            y = stack[sp - 1]
            x = stack[sp - 2]
            sp -= 1
            r = binop(aa[pc], x, y, bb[pc], cc[pc])
            if r is None:
                return (OUT_TRAP, 0, steps, n_covered, n_sites,
                        consumed, exhausted, 0, pc)
            stack[sp - 1] = r
            pc += 1
        elif op == OP_UNOP:
            code = aa[pc]
            width = bb[pc]
            m = MASK64 if width == 64 else 0xFFFFFFFF
            x = stack[sp - 1]
            if code == U_NEG:
                stack[sp - 1] = (-x) & m
            elif code == U_BNOT:
                stack[sp - 1] = x ^ m
            else:
                stack[sp - 1] = 1 if x == 0 else 0
            pc += 1
        elif op == OP_JMP:
            pc = aa[pc]
        elif op == OP_JZ:
            sp -= 1
            pc = aa[pc] if stack[sp] == 0 else pc + 1
        elif op == OP_JNZ:
            sp -= 1
            pc = aa[pc] if stack[sp] != 0 else pc + 1
        elif op == OP_LABEL_HIT:
            g = aa[pc]
            if not seen[g]:
                seen[g] = 1
                covered_out[n_covered] = g
                n_covered += 1
            pc += 1
        elif op == OP_CALL:
            nargs = bb[pc]
            if depth >= 128 or lp + cc[pc] > locals_size:
                return (OUT_INTERNAL, 1, steps, n_covered, n_sites,
                        consumed, exhausted, 0, pc)
            ret_pc[depth] = pc + 1
            ret_fp[depth] = fp
            ret_lp[depth] = lp
            depth += 1
            fp = lp
            lp = lp + cc[pc]
            for i in range(nargs - 1, -1, -1):
                sp -= 1
                locals_[fp + i] = stack[sp]
            pc = aa[pc]
        elif op == OP_RET:
            if depth == 0:
                sp -= 1
                exit_p = stack[sp]
                return (OUT_NORMAL, 0, steps, n_covered, n_sites,
                        consumed, exhausted,
                        exit_p - (1 << 64) if exit_p >= (1 << 63) else exit_p,
                        pc)
            depth -= 1
            pc = ret_pc[depth]
            fp = ret_fp[depth]
            lp = ret_lp[depth]
        elif op == OP_POP:
            sp -= 1
            pc += 1
        elif op == OP_ASSERT:
            sp -= 1
            if stack[sp] == 0:
                g = aa[pc]
                if not seen[g]:
                    seen[g] = 1
                    covered_out[n_covered] = g
                    n_covered += 1
                return (OUT_ASSERT, g, steps, n_covered, n_sites,
                        consumed, exhausted, 0, pc)
            pc += 1
        elif op == OP_ERROR:
            return (OUT_ERROR, aa[pc], steps, n_covered, n_sites,
                    consumed, exhausted, 0, pc)
        elif op == OP_HALT_BAD:
            return (OUT_INTERNAL, 0, steps, n_covered, n_sites,
                    consumed, exhausted, 0, pc)
        else:
            return (OUT_INTERNAL, 2, steps, n_covered, n_sites,
                    consumed, exhausted, 0, pc)
