"""Benchmark: compiled simplex kernel vs pure-Python fallback.

Times raw matrix-game solves at several shapes, then a full smart-grid
value run with each backend wired in. Run from the repository root:

    python benchmarks/bench_backends.py
"""

import time

import numpy as np

import rsgame
import rsgame._kernels as kernels
from rsgame import SmartGridParams, approximate_value, build_smartgrid
from rsgame._kernels import _simplex_py

try:
    from rsgame._kernels import _simplex_c
except ImportError:
    _simplex_c = None


def time_kernel(impl, matrices, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for a in matrices:
            status, _, _, _ = impl.solve_positive_game(a, 10000)
            assert status == 0
        best = min(best, time.perf_counter() - t0)
    return best / len(matrices)


def bench_raw_solves():
    rng = np.random.default_rng(0)
    shapes = [(3, 3), (3, 11), (6, 6), (12, 12)]
    print(f"{'shape':>8} | {'python':>12} | {'compiled':>12} | {'speedup':>8}")
    print("-" * 52)
    for shape in shapes:
        matrices = [rng.random(shape) + 1.0 for _ in range(400)]
        t_py = time_kernel(_simplex_py, matrices)
        if _simplex_c is None:
            print(f"{shape!s:>8} | {t_py * 1e6:>10.1f}us | {'n/a':>12} |")
            continue
        t_c = time_kernel(_simplex_c, matrices)
        print(
            f"{shape!s:>8} | {t_py * 1e6:>10.1f}us | {t_c * 1e6:>10.1f}us | "
            f"{t_py / t_c:>7.1f}x"
        )


def bench_value_run():
    model = build_smartgrid(SmartGridParams())
    eps = 8.333e-4
    results = {}
    impls = {"python": _simplex_py}
    if _simplex_c is not None:
        impls["compiled"] = _simplex_c
    original = kernels.solve_positive_game
    try:
        for name, impl in impls.items():
            kernels.solve_positive_game = impl.solve_positive_game
            t0 = time.perf_counter()
            res = approximate_value(model, eps)
            results[name] = (time.perf_counter() - t0, res.rho_tilde)
    finally:
        kernels.solve_positive_game = original

    print()
    print(f"smart-grid value run (eps = {eps}):")
    for name, (elapsed, rho) in results.items():
        print(f"  {name:>8}: {elapsed:7.2f}s   rho_tilde = {rho:.9f}")
    if len(results) == 2:
        print(f"  speedup: {results['python'][0] / results['compiled'][0]:.1f}x")
        assert abs(results["python"][1] - results["compiled"][1]) < 1e-12


if __name__ == "__main__":
    print(f"active backend: {rsgame.backend_name}")
    print()
    bench_raw_solves()
    bench_value_run()
