#!/usr/bin/env python3
"""Compare the compiled interpreter kernel against its pure-Python twin.

Both kernels implement the same run_kernel contract; vm.py picks the
compiled one at import when the extension built. This script times both
on a loop-heavy program (one long execution) and on a fuzzing-shaped
workload (many short branchy executions), checks that they produce
identical results, and prints per-execution times and the speedup.

Run from the repository root:

    python3 benchmarks/bench_vm.py [--repeat R] [--target-secs S]
"""

import argparse
import timeit
from array import array

from minicgen import inject_labels, parse
from minicgen import _kernel_py
from minicgen.bytecode import _s64, compile_program

try:
    from minicgen import _kernel
except ImportError:
    _kernel = None

HOT_SRC = """
int main() {
  int n = input();
  int i = 0;
  int acc = 0;
  while (i < n) {
    int j = 0;
    while (j < 50) {
      acc = acc + ((j ^ acc) % 97);
      j = j + 1;
    }
    i = i + 1;
  }
  if (acc == 123456789) {
    error();
  }
  return acc;
}
"""

SHORT_SRC = """
int main() {
  int x = input();
  int y = input();
  int t = 0;
  if (x > y) {
    t = x - y;
  } else {
    t = y - x;
  }
  if (t % 2 == 0) {
    t = t * 3 + 1;
  }
  while (t > 8) {
    t = t / 2;
  }
  if (t == 7) {
    error();
  }
  return t;
}
"""

STEP_LIMIT = 50_000_000


def build_code(src: str):
    labeled, table = inject_labels(parse(src, "<bench>"))
    return compile_program(labeled, len(table.goals))


def make_runner(kernel, code, inputs):
    enc = array("q", [_s64(v & (2**64 - 1)) for v in inputs]) or array("q", [0])
    n_goals = max(code.n_goals, 1)

    def once():
        covered = array("q", [0] * n_goals)
        sites = array("q", [0] * 256)
        seen = array("b", [0] * n_goals)
        return kernel.run_kernel(
            code.ops, code.a, code.b, code.c, code.entry_pc, code.main_frame,
            enc, len(inputs), STEP_LIMIT, code.n_goals,
            code.locals_size, code.stack_size, covered, sites, seen,
        )

    return once


def time_once(fn, repeat: int, target_secs: float) -> float:
    """Best per-call seconds, with the loop count autoscaled so each
    timing sample runs for roughly target_secs."""
    t = timeit.timeit(fn, number=1)
    number = max(1, int(target_secs / max(t, 1e-9)))
    best = min(timeit.repeat(fn, number=number, repeat=repeat))
    return best / number


def fmt(secs: float) -> str:
    if secs >= 1e-3:
        return f"{secs * 1e3:8.3f} ms"
    return f"{secs * 1e6:8.1f} us"


def bench(name: str, src: str, input_sets, repeat: int, target_secs: float):
    code = build_code(src)
    kernels = [("pure", _kernel_py)]
    if _kernel is not None:
        kernels.insert(0, ("compiled", _kernel))

    for inputs in input_sets:
        baseline = make_runner(_kernel_py, code, inputs)()
        steps = baseline[2]
        print(f"{name}  inputs={inputs}  steps={steps}")
        per = {}
        for kname, kernel in kernels:
            runner = make_runner(kernel, code, inputs)
            out = runner()
            if tuple(out) != tuple(baseline):
                raise SystemExit(f"kernel mismatch on {name}: {out} != {baseline}")
            per[kname] = time_once(runner, repeat, target_secs)
            rate = steps / per[kname] / 1e6
            print(f"  {kname:9s} {fmt(per[kname])} per exec  ({rate:7.1f} M steps/s)")
        if "compiled" in per:
            print(f"  speedup   {per['pure'] / per['compiled']:8.1f}x")
        print()


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5, help="timing samples per kernel")
    ap.add_argument(
        "--target-secs", type=float, default=0.2,
        help="approximate wall time per timing sample",
    )
    args = ap.parse_args()

    if _kernel is None:
        print("compiled kernel not built; timing the pure kernel only\n")

    bench("hot-loop", HOT_SRC, [[2000]], args.repeat, args.target_secs)
    bench(
        "fuzz-shaped", SHORT_SRC, [[123456, -7], [0, 0], [-64, 4096]],
        args.repeat, args.target_secs,
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
