# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled interpreter kernel.

C-typed twin of `_kernel_py.run_kernel`: same entry point, same results.
Patterns live in C uint64; arithmetic is done at the declared width with
explicit sign extension, matching the shared arithmetic rules.
"""

from libc.stdlib cimport free, malloc

KERNEL_NAME = "compiled"

ctypedef unsigned long long u64
ctypedef long long i64

cdef enum:
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

cdef enum:
    B_ADD = 0
    B_SUB = 1
    B_MUL = 2
    B_DIV = 3
    B_MOD = 4
    B_EQ = 5
    B_NE = 6
    B_LT = 7
    B_LE = 8
    B_GT = 9
    B_GE = 10
    B_AND = 11
    B_OR = 12
    B_XOR = 13
    B_SHL = 14
    B_SHR = 15

cdef enum:
    U_NEG = 0
    U_BNOT = 1
    U_LNOT = 2

cdef enum:
    OUT_NORMAL = 0
    OUT_ASSERT = 1
    OUT_ERROR = 2
    OUT_TRAP = 3
    OUT_STEP = 4
    OUT_INTERNAL = 5

cdef enum:
    SITE_CAP = 256
    MAX_DEPTH = 128


cdef inline i64 sext(u64 x, int width) nogil:
    if width == 64:
        return <i64> x
    return <i64> (<int> (x & <u64> 0xFFFFFFFF))


cdef inline int do_binop(int code, u64 x, u64 y, int width, int signed_, u64 *out) nogil:
    cdef u64 m = <u64> 0xFFFFFFFFFFFFFFFF if width == 64 else <u64> 0xFFFFFFFF
    cdef i64 sx, sy, q
    cdef int s
    if code == B_ADD:
        out[0] = (x + y) & m
    elif code == B_SUB:
        out[0] = (x - y) & m
    elif code == B_MUL:
        out[0] = (x * y) & m
    elif code == B_DIV or code == B_MOD:
        if y == 0:
            return 1
        if signed_:
            sx = sext(x, width)
            sy = sext(y, width)
            if sy == -1:
                # MIN / -1 wraps back to MIN; remainder is 0
                out[0] = (0 - x) & m if code == B_DIV else 0
            else:
                q = sx / sy
                out[0] = (<u64> q) & m if code == B_DIV else (<u64> (sx % sy)) & m
        else:
            out[0] = x / y if code == B_DIV else x % y
    elif code == B_EQ:
        out[0] = 1 if x == y else 0
    elif code == B_NE:
        out[0] = 1 if x != y else 0
    elif code == B_LT or code == B_LE or code == B_GT or code == B_GE:
        if signed_:
            sx = sext(x, width)
            sy = sext(y, width)
            if code == B_LT:
                out[0] = 1 if sx < sy else 0
            elif code == B_LE:
                out[0] = 1 if sx <= sy else 0
            elif code == B_GT:
                out[0] = 1 if sx > sy else 0
            else:
                out[0] = 1 if sx >= sy else 0
        else:
            if code == B_LT:
                out[0] = 1 if x < y else 0
            elif code == B_LE:
                out[0] = 1 if x <= y else 0
            elif code == B_GT:
                out[0] = 1 if x > y else 0
            else:
                out[0] = 1 if x >= y else 0
    elif code == B_AND:
        out[0] = x & y
    elif code == B_OR:
        out[0] = x | y
    elif code == B_XOR:
        out[0] = x ^ y
    elif code == B_SHL:
        s = <int> (y & <u64> (width - 1))
        out[0] = (x << s) & m
    else:  # B_SHR
        s = <int> (y & <u64> (width - 1))
        if signed_:
            out[0] = (<u64> (sext(x, width) >> s)) & m
        else:
            out[0] = x >> s
    return 0


def run_kernel(
    long long[::1] ops,
    long long[::1] aa,
    long long[::1] bb,
    long long[::1] cc,
    int entry_pc,
    int main_frame,
    long long[::1] inputs,
    int n_inputs,
    long long step_limit,
    int n_goals,
    int locals_size,
    int stack_size,
    long long[::1] covered_out,
    long long[::1] sites_out,
    signed char[::1] seen,
):
    """Execute bytecode; see `_kernel_py.run_kernel` for the contract."""
    cdef u64 *stack = <u64 *> malloc(stack_size * sizeof(u64))
    cdef u64 *locs = <u64 *> malloc(locals_size * sizeof(u64))
    cdef long long ret_pc[MAX_DEPTH]
    cdef long long ret_fp[MAX_DEPTH]
    cdef long long ret_lp[MAX_DEPTH]
    cdef int sp = 0, fp = 0, depth = 0
    cdef int lp = main_frame
    cdef long long pc = entry_pc
    cdef long long steps = 0
    cdef int consumed = 0, exhausted = 0, n_covered = 0, n_sites = 0
    cdef int outcome = OUT_INTERNAL
    cdef long long detail = 2
    cdef long long exit_s64 = 0
    cdef long long trap_pc = 0
    cdef int op, width, signed_, i, nargs, g
    cdef u64 x, y, r, lo, hi, m
    cdef i64 xs
    cdef long long packed

    if stack == NULL or locs == NULL:
        if stack != NULL:
            free(stack)
        if locs != NULL:
            free(locs)
        raise MemoryError()
    for i in range(locals_size):
        locs[i] = 0

    while True:
        op = <int> ops[pc]
        if op == OP_STEP:
            steps += 1
            if steps > step_limit:
                outcome = OUT_STEP
                detail = 0
                steps -= 1
                trap_pc = pc
                break
            pc += 1
        elif op == OP_ICONST:
            stack[sp] = <u64> aa[pc]
            sp += 1
            pc += 1
        elif op == OP_LOAD:
            stack[sp] = locs[fp + aa[pc]]
            sp += 1
            pc += 1
        elif op == OP_STORE:
            sp -= 1
            locs[fp + aa[pc]] = stack[sp]
            pc += 1
        elif op == OP_INPUT:
            if consumed < n_inputs:
                x = <u64> inputs[consumed]
            else:
                x = 0
                exhausted = 1
            if n_sites < SITE_CAP:
                sites_out[n_sites] = aa[pc]
                n_sites += 1
            consumed += 1
            width = <int> bb[pc]
            stack[sp] = x & (<u64> 0xFFFFFFFFFFFFFFFF if width == 64 else <u64> 0xFFFFFFFF)
            sp += 1
            pc += 1
        elif op == OP_CLAMP:
            packed = cc[pc]
            width = <int> (packed & 0xFF)
            signed_ = <int> (packed >> 8)
            x = stack[sp - 1]
            lo = <u64> aa[pc]
            hi = <u64> bb[pc]
            if signed_:
                xs = sext(x, width)
                if xs < sext(lo, width):
                    stack[sp - 1] = lo
                elif xs > sext(hi, width):
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
            if do_binop(<int> aa[pc], x, y, <int> bb[pc], <int> cc[pc], &r):
                outcome = OUT_TRAP
                detail = 0
                trap_pc = pc
                break
            stack[sp - 1] = r
            pc += 1
        elif op == OP_UNOP:
            width = <int> bb[pc]
            m = <u64> 0xFFFFFFFFFFFFFFFF if width == 64 else <u64> 0xFFFFFFFF
            x = stack[sp - 1]
            i = <int> aa[pc]
            if i == U_NEG:
                stack[sp - 1] = (0 - x) & m
            elif i == U_BNOT:
                stack[sp - 1] = x ^ m
            else:
                stack[sp - 1] = 1 if x == 0 else 0
            pc += 1
        elif op == OP_JMP:
            pc = aa[pc]
        elif op == OP_JZ:
            sp -= 1
            if stack[sp] == 0:
                pc = aa[pc]
            else:
                pc += 1
        elif op == OP_JNZ:
            sp -= 1
            if stack[sp] != 0:
                pc = aa[pc]
            else:
                pc += 1
        elif op == OP_LABEL_HIT:
            g = <int> aa[pc]
            if not seen[g]:
                seen[g] = 1
                covered_out[n_covered] = g
                n_covered += 1
            pc += 1
        elif op == OP_CALL:
            nargs = <int> bb[pc]
            if depth >= MAX_DEPTH or lp + cc[pc] > locals_size:
                outcome = OUT_INTERNAL
                detail = 1
                trap_pc = pc
                break
            ret_pc[depth] = pc + 1
            ret_fp[depth] = fp
            ret_lp[depth] = lp
            depth += 1
            fp = lp
            lp = lp + <int> cc[pc]
            for i in range(nargs - 1, -1, -1):
                sp -= 1
                locs[fp + i] = stack[sp]
            pc = aa[pc]
        elif op == OP_RET:
            if depth == 0:
                sp -= 1
                outcome = OUT_NORMAL
                detail = 0
                exit_s64 = <long long> stack[sp]
                trap_pc = pc
                break
            depth -= 1
            pc = ret_pc[depth]
            fp = <int> ret_fp[depth]
            lp = <int> ret_lp[depth]
        elif op == OP_POP:
            sp -= 1
            pc += 1
        elif op == OP_ASSERT:
            sp -= 1
            if stack[sp] == 0:
                g = <int> aa[pc]
                if not seen[g]:
                    seen[g] = 1
                    covered_out[n_covered] = g
                    n_covered += 1
                outcome = OUT_ASSERT
                detail = g
                trap_pc = pc
                break
            pc += 1
        elif op == OP_ERROR:
            outcome = OUT_ERROR
            detail = aa[pc]
            trap_pc = pc
            break
        else:
            outcome = OUT_INTERNAL
            detail = 0 if op == OP_HALT_BAD else 2
            trap_pc = pc
            break

    free(stack)
    free(locs)
    return (outcome, detail, steps, n_covered, n_sites, consumed,
            exhausted, exit_s64, trap_pc)
