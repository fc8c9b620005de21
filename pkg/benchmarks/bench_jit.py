"""Compiled kernels against their interpreted versions.

Usage::

    python3 benchmarks/bench_jit.py [--repeat 3] [--size 2000]

Each kernel is warmed up once (compilation is not timed) and then timed on
identical inputs through the jitted entry point and through ``.py_func``.
The two results are also compared, so the script doubles as a consistency
check between the two code paths.  ``.py_func`` only unwraps the outer
function: helpers it calls stay compiled, so kernels that mostly delegate
(the Bessel evaluation inside ``log_qn``, the Sturm count inside the
bisection) show modest ratios.  Run with ``FUJITA_LAB_JIT=0`` for a fully
interpreted baseline.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fujita_lab._jit import JIT_ENABLED, python_impl
from fujita_lab.pde_sim import _core
from fujita_lab.special_kernels import heat
from fujita_lab import spectral


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def case_kernel(size):
    rng = np.random.default_rng(0)
    t = rng.uniform(0.1, 50.0, size)
    r = rng.uniform(0.1, 20.0, size)
    rho = rng.uniform(0.1, 20.0, size)

    def run(f):
        out = np.empty(size)
        f(3.5, t, r, rho, out)
        return out

    return heat._log_qn_array, run


def case_sturm(size):
    d = 2.0 + np.linspace(0.0, 1.0, size)
    e = -np.ones(size - 1)

    def run(f):
        return f(d, e, -10.0, 10.0, 200)[0]

    return spectral._bisect_lowest, run


def case_cn(size):
    rng = np.random.default_rng(1)
    u = rng.uniform(0.0, 1.0, size)
    lo = np.full(size, 1.0)
    up = np.full(size, 1.0)
    di = np.full(size, -2.0)
    cp = np.empty(size)
    dp = np.empty(size)

    def run(f):
        out = np.empty(size)
        for _ in range(20):
            f(u, out, lo, di, up, 0.1, cp, dp)
        return out

    return _core.crank_nicolson, run


def case_react(size):
    rng = np.random.default_rng(2)
    u = rng.uniform(0.0, 1.0, size)
    a = rng.uniform(0.0, 1.0, size)
    b = rng.uniform(-1.0, 0.0, size)

    def run(f):
        out = np.empty(size)
        for _ in range(20):
            f(u, out, 0.01, 2.5, b, a)
        return out

    return _core.react, run


CASES = {
    "log_qn (array)": case_kernel,
    "Sturm bisection": case_sturm,
    "Crank-Nicolson step": case_cn,
    "exact reaction step": case_react,
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--size", type=int, default=2000)
    args = ap.parse_args(argv)
    if not JIT_ENABLED:
        print("FUJITA_LAB_JIT=0: both columns run the interpreted code")
    print(f"{'kernel':<22} {'jit [ms]':>10} {'python [ms]':>12} {'speedup':>9} {'max |diff|':>11}")
    for name, make in CASES.items():
        kernel, run = make(args.size)
        run(kernel)  # compile
        tj, rj = _best(lambda: run(kernel), args.repeat)
        tp, rp = _best(lambda: run(python_impl(kernel)), args.repeat)
        diff = float(np.max(np.abs(np.asarray(rj) - np.asarray(rp))))
        print(f"{name:<22} {1e3 * tj:>10.3f} {1e3 * tp:>12.3f} {tp / tj:>8.1f}x {diff:>11.2e}")


if __name__ == "__main__":
    main()
