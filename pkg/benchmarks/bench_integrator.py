"""Benchmark the trajectory kernel: numba-compiled versus pure numpy.

The two code paths execute the same function object source; the compiled one
is selected at import time unless ``CONFSYM_NO_NUMBA=1`` is set.  This script
times both directly and reports the speedup, so regressions in either path
are visible.

Run:  python benchmarks/bench_integrator.py [--steps N] [--repeats R]
"""

import argparse
import time

import numpy as np

from confsym._accel import NUMBA_ENABLED
from confsym.mechanics import _rk4_core, _rk4_core_py


def time_kernel(kernel, q0, p0, lam, dt, nsteps, repeats):
    qs = np.empty((nsteps + 1, q0.shape[0]))
    ps = np.empty_like(qs)
    kernel(q0, p0, lam, dt, 10, qs[:11].copy(), ps[:11].copy(), 1e-6)  # warm up
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        kernel(q0, p0, lam, dt, nsteps, qs, ps, 1e-6)
        best = min(best, time.perf_counter() - start)
    return best, qs, ps


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=100_000)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--n", type=int, default=3, help="configuration dimension")
    args = parser.parse_args()

    q0 = 1.2 * np.ones(args.n)
    p0 = 0.3 * (-1.0) ** np.arange(args.n)
    lam, dt = 0.5, 1e-3

    t_pure, qs_a, _ = time_kernel(_rk4_core_py, q0, p0, lam, dt, args.steps, args.repeats)
    print(f"pure numpy : {t_pure:.4f} s  ({args.steps / t_pure:,.0f} steps/s)")

    if NUMBA_ENABLED:
        t_jit, qs_b, _ = time_kernel(_rk4_core, q0, p0, lam, dt, args.steps, args.repeats)
        print(f"numba njit : {t_jit:.4f} s  ({args.steps / t_jit:,.0f} steps/s)")
        print(f"speedup    : {t_pure / t_jit:.1f}x")
        mismatch = np.max(np.abs(qs_a - qs_b))
        print(f"path agreement: max |dq| = {mismatch:.3e}")
    else:
        print("numba path disabled (CONFSYM_NO_NUMBA set or numba missing)")


if __name__ == "__main__":
    main()
