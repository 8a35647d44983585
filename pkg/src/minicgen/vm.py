"""Kernel selection and the raw bytecode-run wrapper.

The compiled kernel is used when the extension built; set
MINICGEN_PURE_VM=1 to force the pure-Python twin. Both expose the same
run_kernel contract, so everything above this module is oblivious to
which one is active.
"""

from __future__ import annotations

import os
from array import array

from .bytecode import Code, _s64

if os.environ.get("MINICGEN_PURE_VM") == "1":
    from . import _kernel_py as _kernel
else:
    try:
        from . import _kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as _kernel

KERNEL_NAME = _kernel.KERNEL_NAME

MASK64 = 0xFFFFFFFFFFFFFFFF


class RawResult(tuple):
    __slots__ = ()

    @property
    def outcome(self):
        return self[0]

    @property
    def detail(self):
        return self[1]

    @property
    def steps(self):
        return self[2]

    @property
    def covered(self):
        return self[3]

    @property
    def sites(self):
        return self[4]

    @property
    def consumed(self):
        return self[5]

    @property
    def exhausted(self):
        return self[6]

    @property
    def exit_s64(self):
        return self[7]

    @property
    def trap_pc(self):
        return self[8]


def run_code(code: Code, inputs: list[int], step_limit: int) -> RawResult:
    """Run compiled bytecode on raw input values (arbitrary Python ints;
    reduced to 64-bit patterns here, then to site width at each read)."""
    enc = array("q", [_s64(v & MASK64) for v in inputs])
    if not enc:
        enc = array("q", [0])
    covered = array("q", [0] * max(code.n_goals, 1))
    sites = array("q", [0] * 256)
    seen = array("b", [0] * max(code.n_goals, 1))
    (outcome, detail, steps, n_covered, n_sites, consumed,
     exhausted, exit_s64, trap_pc) = _kernel.run_kernel(
        code.ops, code.a, code.b, code.c,
        code.entry_pc, code.main_frame,
        enc, len(inputs), step_limit,
        code.n_goals, code.locals_size, code.stack_size,
        covered, sites, seen,
    )
    return RawResult((
        outcome, detail, steps,
        list(covered[:n_covered]),
        list(sites[:n_sites]),
        consumed, bool(exhausted), exit_s64, trap_pc,
    ))
