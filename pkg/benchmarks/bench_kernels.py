#!/usr/bin/env python3
"""Timing comparison of the numpy and compiled kernel backends.

Runs each fill kernel on the same inputs through both backends and
reports ns/point plus the speedup. The compiled module is optional; when
it is missing only the numpy numbers print.

Usage: python benchmarks/bench_kernels.py [n_points]
"""

import math
import sys
import time

import numpy as np

from spiralsheet._kernels import _py

try:
    from spiralsheet._kernels import _c
except ImportError:
    _c = None

TWO_PI = 2.0 * math.pi
A = 0.8
RTOL = 1e-12
EXCL = 1e-9 * math.sqrt(1.0 + A * A)


def best_of(fn, repeats=5):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_cases(n):
    rng = np.random.default_rng(0)
    r = np.ascontiguousarray(np.exp(rng.uniform(-4.0, 4.0, n)))
    theta = np.ascontiguousarray(rng.uniform(-TWO_PI, 2 * TWO_PI, n))
    width = TWO_PI * A / (1.0 + A * A)
    x = np.ascontiguousarray(rng.uniform(-0.999 * width, -0.001 * width, n))
    y = np.ascontiguousarray(rng.uniform(-3.0, 3.0, n))
    thetas3 = np.array([0.0, TWO_PI / 3.0, 2.0 * TWO_PI / 3.0])
    gs3 = np.array([1.0, 1.0, 1.0])
    a1 = np.array([0.3, -0.2, 0.9])
    a2 = np.array([1.0, 0.1, -0.4])

    j = np.empty(n, np.int64)
    d = np.empty(n, np.float64)
    sx = np.empty(n, np.float64)
    sy = np.empty(n, np.float64)
    ext = np.empty(n, np.complex128)
    phi = np.empty(n, np.complex128)
    w = np.empty(n, np.complex128)
    status = np.empty(n, np.int8)
    which = np.empty(n, np.int32)

    def case(impl):
        return {
            "winding": lambda: impl.winding_fill(r, theta, A, 0.0, j, d),
            "map_strip": lambda: impl.map_strip_fill(r, theta, A, sx, sy, j, d),
            "map_exterior": lambda: impl.map_exterior_fill(x, y, A, ext),
            "single_field": lambda: impl.single_field_fill(
                r, theta, A, 1.27, 0.0, RTOL, EXCL, phi, w, status
            ),
            "family_field_m3": lambda: impl.family_field_fill(
                r, theta, A, thetas3, gs3, RTOL, EXCL, phi, w, status, which
            ),
            "family_strip_m3": lambda: impl.family_strip_fill(
                x, y, A, thetas3, a1, a2, RTOL, w, status, which
            ),
        }

    return case


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    case = make_cases(n)
    py_cases = case(_py)
    c_cases = case(_c) if _c is not None else None

    print(f"n = {n} points per call, best of 5, a = {A}")
    if _c is None:
        print("compiled backend not built; numpy only")
    header = f"{'kernel':<18}{'numpy ns/pt':>14}"
    if c_cases:
        header += f"{'compiled ns/pt':>16}{'speedup':>10}"
    print(header)
    for name in py_cases:
        t_py = best_of(py_cases[name]) / n * 1e9
        line = f"{name:<18}{t_py:>14.1f}"
        if c_cases:
            t_c = best_of(c_cases[name]) / n * 1e9
            line += f"{t_c:>16.1f}{t_py / t_c:>10.2f}x"
        print(line)


if __name__ == "__main__":
    main()
