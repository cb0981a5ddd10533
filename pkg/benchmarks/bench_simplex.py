#!/usr/bin/env python3
"""Benchmark: compiled simplex kernel vs the numpy fallback.

Times both backends on the problem family that dominates pipeline runtime
(fingerprint-fit recovery programs at several sample sizes) and on small
dense random programs (the transport-oracle shape).  Run:

    python benchmarks/bench_simplex.py
"""

from __future__ import annotations

import time

import numpy as np

from histolearn import Config, DistributionSpec, draw_samples, make_distribution
from histolearn.core import build_fingerprint
from histolearn.lp import _driver, _simplex_py
from histolearn.recover import assemble_lp, make_grid, make_thresholds

try:
    from histolearn.lp import _simplex as _simplex_cy
except ImportError:
    _simplex_cy = None

KERNELS = [("python", _simplex_py)] + (
    [("cython", _simplex_cy)] if _simplex_cy is not None else []
)


def recovery_problem(n: int, m_support: int, seed: int):
    cfg = Config()
    truth = make_distribution(DistributionSpec("uniform", {"m": m_support}))
    fp = build_fingerprint(draw_samples(truth, n, seed))
    thresholds = make_thresholds(n, cfg)
    grid = make_grid(n, thresholds, cfg)
    return assemble_lp(fp, thresholds, grid)


def random_problem(rng, m: int, d: int):
    A = rng.normal(size=(m, d))
    b = A @ rng.uniform(0.1, 2.0, size=d)
    c = rng.uniform(0.0, 2.0, size=d)
    return c, A, b


def time_solve(kernel, c, A, b, repeats: int) -> tuple[float, float]:
    best = float("inf")
    obj = float("nan")
    for _ in range(repeats):
        t0 = time.perf_counter()
        status, _, obj, _ = _driver.solve_standard_form(c, A, b, kernel)
        best = min(best, time.perf_counter() - t0)
        assert status == "optimal", status
    return best, obj


def main() -> None:
    rows = []

    for n, support, label in (
        (10_000, 300, "recovery n=1e4"),
        (100_000, 1000, "recovery n=1e5"),
    ):
        prob = recovery_problem(n, support, seed=0)
        shape = f"{prob.constraints_eq.shape[0]}x{prob.constraints_eq.shape[1]}"
        timings = {}
        for name, kernel in KERNELS:
            sec, obj = time_solve(
                kernel, prob.objective, prob.constraints_eq, prob.rhs_eq, repeats=3
            )
            timings[name] = (sec, obj)
        rows.append((f"{label} ({shape})", timings))

    rng = np.random.default_rng(1)
    for m, d, reps, label in ((4, 16, 300, "small dense 4x16"), (30, 120, 50, "medium dense 30x120")):
        problems = [random_problem(rng, m, d) for _ in range(reps)]
        timings = {}
        for name, kernel in KERNELS:
            t0 = time.perf_counter()
            for c, A, b in problems:
                _driver.solve_standard_form(c, A, b, kernel)
            timings[name] = ((time.perf_counter() - t0) / reps, float("nan"))
        rows.append((f"{label} x{reps}", timings))

    names = [name for name, _ in KERNELS]
    header = f"{'problem':32s}" + "".join(f"{name:>14s}" for name in names)
    if len(names) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    print("-" * len(header))
    for label, timings in rows:
        line = f"{label:32s}"
        for name in names:
            line += f"{timings[name][0] * 1e3:13.2f}ms"
        if len(names) == 2:
            line += f"{timings[names[0]][0] / timings[names[1]][0]:9.2f}x"
        print(line)
    objs = [
        (label, {name: t[name][1] for name in names})
        for label, t in rows
        if not np.isnan(t[names[0]][1])
    ]
    for label, by_backend in objs:
        values = list(by_backend.values())
        if len(values) == 2 and abs(values[0] - values[1]) > 1e-6 * (1 + abs(values[0])):
            print(f"WARNING: objective mismatch on {label}: {by_backend}")


if __name__ == "__main__":
    main()
