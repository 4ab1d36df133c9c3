"""Timing comparison of the numba and numpy kernel backends.

Usage:
    python benchmarks/bench_kernels.py [--repeats N] [--skip-solve]

Per-kernel timings call both implementations directly (they coexist in one
process); the whole-solve comparison re-runs the solver in subprocesses with
PSDFIT_NUMBA=0/1 because the backend binds at import time.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from psdfit import _kernels

SIZES = [(4, 2), (16, 2), (16, 8), (64, 8), (64, 16)]


def time_call(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        begin = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - begin)
    return best


def bench_kernels(repeats):
    if not _kernels._HAVE_NUMBA:
        print("numba unavailable; nothing to compare")
        return
    rng = np.random.default_rng(0)
    header = f"{'kernel':<16}{'n':>4}{'k':>4}{'numpy':>12}{'numba':>12}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n, k in SIZES:
        mi = n
        A = rng.standard_normal((mi, mi))
        B = rng.standard_normal((mi, n))
        Y = rng.standard_normal((n, k))
        D = rng.standard_normal((n, k))
        out = np.zeros((n, k))
        cases = [
            ("residual_sq", _kernels.residual_sq_np, _kernels.residual_sq_nb, (A, B, Y)),
            (
                "gradient_accum",
                _kernels.gradient_accum_np,
                _kernels.gradient_accum_nb,
                (A, B, Y, out),
            ),
            (
                "quartic_terms",
                _kernels.quartic_terms_np,
                _kernels.quartic_terms_nb,
                (A, B, Y, D),
            ),
        ]
        for name, f_np, f_nb, args in cases:
            f_nb(*args)  # compile before timing
            t_np = time_call(f_np, args, repeats)
            t_nb = time_call(f_nb, args, repeats)
            print(
                f"{name:<16}{n:>4}{k:>4}{t_np * 1e6:>10.1f}us{t_nb * 1e6:>10.1f}us"
                f"{t_np / t_nb:>8.1f}x"
            )


_SOLVE_SNIPPET = """
import time
import psdfit
from psdfit import _kernels
_kernels.warmup()
inst = psdfit.generate_instance(48, 8, m=3, seed=0, mode="consistent")
cfg = psdfit.SolverConfig(epsilon=1e-6, max_iterations=2000)
begin = time.perf_counter()
result = psdfit.solve(inst, config=cfg, seed=1)
elapsed = time.perf_counter() - begin
print(f"{_kernels.BACKEND}: {elapsed:.3f}s for {result.iterations} iterations "
      f"(f={result.trace[-1].f_value:.3e})")
"""


def bench_solve():
    print()
    print("whole solve, n=48 k=8 m=3 (fresh process per backend):")
    for flag in ("0", "1"):
        env = dict(os.environ, PSDFIT_NUMBA=flag)
        proc = subprocess.run(
            [sys.executable, "-c", _SOLVE_SNIPPET],
            capture_output=True,
            text=True,
            env=env,
        )
        if proc.returncode != 0:
            print(f"  PSDFIT_NUMBA={flag} failed: {proc.stderr.strip()}")
        else:
            print(f"  {proc.stdout.strip()}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--skip-solve", action="store_true")
    args = parser.parse_args()
    bench_kernels(args.repeats)
    if not args.skip_solve:
        bench_solve()


if __name__ == "__main__":
    main()
