"""Benchmark the compiled edge-flux kernels against the pure-Python fallback.

Runs the quadratic Godunov and Engquist-Osher sweeps on identical inputs,
checks bitwise agreement, and reports throughput for both backends.

Usage: python benchmarks/bench_kernels.py [--cells N] [--repeats R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fluxjump import _kernels_fallback as fb
from fluxjump import kernels


def _time(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cells", type=int, default=200_000)
    ap.add_argument("--repeats", type=int, default=20)
    args = ap.parse_args()

    rng = np.random.default_rng(12345)
    n = args.cells
    a = rng.uniform(-1.0, 1.0, n)
    b = rng.uniform(-1.0, 1.0, n)
    # spatially varying Burgers-type coefficients
    al = rng.uniform(0.2, 0.8, n)
    be = rng.uniform(-0.3, 0.3, n)
    ga = rng.uniform(-0.1, 0.1, n)
    out_c = np.empty(n)
    out_p = np.empty(n)

    print(f"active backend: {kernels.BACKEND}")
    print(f"cells = {n}, repeats = {args.repeats} (best-of timing)")
    print()

    core = kernels._core
    if core is None:
        print("compiled backend unavailable; timing the fallback only")

    for name, cfn, pfn in [
        ("godunov", None if core is None else core.quad_godunov_sweep, fb.quad_godunov_sweep),
        ("engquist-osher", None if core is None else core.quad_eo_sweep, fb.quad_eo_sweep),
    ]:
        pfn(a, b, al, be, ga, out_p)
        t_py = _time(pfn, a, b, al, be, ga, out_p, repeats=args.repeats)
        line = f"{name:>15}: python {n / t_py / 1e6:8.1f} Mcell/s"
        if cfn is not None:
            cfn(a, b, al, be, ga, out_c)
            t_c = _time(cfn, a, b, al, be, ga, out_c, repeats=args.repeats)
            match = "bitwise equal" if np.array_equal(out_c, out_p) else "MISMATCH"
            line += (
                f", compiled {n / t_c / 1e6:8.1f} Mcell/s"
                f" ({t_py / t_c:4.1f}x), {match}"
            )
            if match == "MISMATCH":
                bad = np.flatnonzero(out_c != out_p)
                raise SystemExit(
                    f"backend mismatch at {bad.size} cells, first index {bad[0]}"
                )
        print(line)


if __name__ == "__main__":
    main()
