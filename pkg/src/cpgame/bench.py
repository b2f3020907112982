"""Benchmark the compiled kernels against the numpy reference.

Run with ``python -m cpgame.bench``. Workloads mirror the hot paths:
batch library evaluation, expected-cost accumulation, and the
continuous candidate-peak search on a 96-interval day.
"""

import time

import numpy as np

from . import _kernels_py
from .rng import derive_rng

try:
    from . import _kernels
except ImportError:
    _kernels = None


def _workloads():
    rng = derive_rng(7, 777)
    t96, t24 = 96, 24
    opp96 = 80000.0 + 8000.0 * rng.random(t96)
    prices96 = 20.0 + 400.0 * rng.random(t96)
    lib = rng.random((2325, t24))
    lib -= lib.mean(axis=1, keepdims=True)
    base24 = np.full(t24, 1000.0)
    opp24 = 60000.0 + 20000.0 * rng.random(t24)
    prices24 = 20.0 + 100.0 * rng.random(t24)
    profiles = opp24[None, :] + 500.0 * rng.random((200, t24))
    weights = np.full(200, 1.0 / 200)
    frozen = np.full(30, 1000.0)

    return [
        (
            "total_costs_batch (2325 x 24)",
            lambda k: k.total_costs_batch(lib, base24, opp24, prices24, 5.72e9, 1e-6),
            20,
        ),
        (
            "expected_total_costs_batch (200 profiles)",
            lambda k: k.expected_total_costs_batch(
                lib, base24, profiles, weights, prices24, 5.72e9, 1e-6
            ),
            3,
        ),
        (
            "continuous_search (96 intervals, 30 frozen)",
            lambda k: k.continuous_search(
                opp96, prices96, frozen, 0.0, 1500.0, 96000.0, 101, 5.72e9, 1e-6, None
            ),
            3,
        ),
    ]


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.append(("compiled", _kernels))
    else:
        print("compiled backend unavailable; timing the reference only")

    print(f"{'workload':<44} " + " ".join(f"{n:>12}" for n, _ in backends) + "  speedup")
    for name, call, repeats in _workloads():
        times = [_time(lambda k=kernel: call(k), repeats) for _, kernel in backends]
        speedup = times[0] / times[-1] if len(times) > 1 else 1.0
        cells = " ".join(f"{t * 1e3:>10.2f}ms" for t in times)
        print(f"{name:<44} {cells}  {speedup:>6.1f}x")


if __name__ == "__main__":
    main()
