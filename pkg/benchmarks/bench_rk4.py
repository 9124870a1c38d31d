"""Compare the numba and numpy RK4 kernels on the sphere latitude loop.

Run with ``python3 benchmarks/bench_rk4.py [--repeat R]``.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from weyldirac.holonomy import NumericConnection, kernels
from weyldirac.riemann import christoffel
from weyldirac.scenario import catalog


def system(steps: int) -> np.ndarray:
    s = catalog("sphere2")
    nc = NumericConnection(christoffel(s.metric))
    return nc.system(s.loop_path(steps).curves[0], steps)


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if kernels.rk4_linear_numba is not None else [])
    y0 = np.array([1.0, 0.0])
    if "numba" in backends:
        kernels.rk4_linear(system(16), y0, 1 / 16, "numba")  # compile once
    print(f"{'steps':>8} " + " ".join(f"{b + ' [ms]':>14}" for b in backends) + f" {'max |diff|':>12}")
    for steps in (1024, 4096, 16384, 65536):
        A = system(steps)
        h = 1.0 / steps
        res = {b: kernels.rk4_linear(A, y0, h, b) for b in backends}
        times = {b: best_of(lambda b=b: kernels.rk4_linear(A, y0, h, b), args.repeat) for b in backends}
        diff = max(float(np.max(np.abs(res[b] - res["numpy"]))) for b in backends)
        print(f"{steps:>8} " + " ".join(f"{1e3 * times[b]:>14.3f}" for b in backends) + f" {diff:>12.2e}")


if __name__ == "__main__":
    main()
