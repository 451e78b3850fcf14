"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both paths are called explicitly (use_numba=True/False), so the env flag
does not matter here; without numba only the numpy column is printed.
"""
import argparse
import time

import numpy as np

from dliouville import kernels
from dliouville._accel import HAVE_NUMBA


def best_of(fn, repeat):
    fn()  # warm-up (and JIT compile)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    rng = np.random.default_rng(0)
    z = rng.uniform(-1, 1, 400) + 1j * rng.uniform(-0.3, 0.3, 400)
    x = np.linspace(-30, 30, 2001) + 0.5j
    w = np.exp(-x.real ** 2 / 50).astype(complex)
    yield "trap_sum 400x2001", lambda nb: kernels.trap_sum(z, x, w, use_numba=nb)
    a = 0.5 * np.exp(2j * np.pi * rng.uniform(size=2000))
    y = 0.6 * np.exp(0.4j)
    yield "log_poch 2000", lambda nb: kernels.log_poch(a, y, use_numba=nb)
    prev, curr = np.exp(rng.uniform(-1, 1, (2, 4096)))
    yield "liouville_row 4096", lambda nb: kernels.liouville_row(prev, curr, use_numba=nb)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'diff / max':>14}")
    for name, fn in cases():
        t_np = best_of(lambda: fn(False), args.repeat)
        if HAVE_NUMBA:
            t_nb = best_of(lambda: fn(True), args.repeat)
            a, b = fn(True), fn(False)
            diff = float(np.max(np.abs(a - b)) / np.max(np.abs(b)))
            print(f"{name:<22}{1e3 * t_np:12.3f}{1e3 * t_nb:12.3f}{t_np / t_nb:10.2f}{diff:14.2e}")
        else:
            print(f"{name:<22}{1e3 * t_np:12.3f}{'-':>12}{'-':>10}{'-':>14}")


if __name__ == "__main__":
    main()
