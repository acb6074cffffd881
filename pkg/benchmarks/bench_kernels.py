"""Timing table for the hot kernels: numba against the pure-numpy fallback.

Run as `python3 benchmarks/bench_kernels.py`.  Respects SG_NUMBA=0 (in which
case only the numpy column is populated).
"""
import time

import numpy as np

from sglap import _kernels
from sglap.address import build_level_graph
from sglap.harmonic import HARMONIC_MATRICES


def best_of(fn, args, repeats=7):
    fn(*args)  # warm-up (also triggers jit compilation)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    g = build_level_graph(8)
    cell_values = rng.standard_normal((3**8, 3))
    vertex_values = rng.standard_normal(g.size)
    sym = rng.standard_normal((240, 240))
    sym = sym + sym.T

    cases = [
        ("extend_level (3^8 cells)", _kernels.extend_level, (cell_values, HARMONIC_MATRICES)),
        (
            "laplacian_apply (V_8)",
            _kernels.laplacian_apply,
            (g.indptr, g.indices, g.degree, vertex_values),
        ),
        ("jacobi_eigh (240x240)", _kernels.jacobi_eigh, (sym,)),
    ]

    backends = [False, True] if _kernels.HAS_NUMBA else [False]
    timings = {}
    for flag in backends:
        _kernels.set_numba(flag)
        assert _kernels.using_numba() == flag
        for name, fn, args in cases:
            timings[name, flag] = best_of(fn, args)

    header = f"{'kernel':<28} {'numpy':>12} {'numba':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, _, _ in cases:
        t_np = timings[name, False]
        if _kernels.HAS_NUMBA:
            t_nb = timings[name, True]
            print(f"{name:<28} {t_np * 1e3:>10.3f}ms {t_nb * 1e3:>10.3f}ms {t_np / t_nb:>8.1f}x")
        else:
            print(f"{name:<28} {t_np * 1e3:>10.3f}ms {'n/a':>12} {'n/a':>9}")
    if not _kernels.HAS_NUMBA:
        print("(numba unavailable; install the 'accel' extra for the comparison column)")


if __name__ == "__main__":
    main()
