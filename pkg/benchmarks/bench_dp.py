"""Benchmark the native (Cython) convolution backend against the NumPy
fallback on the absorbing-kernel DP.

Run:  python3 benchmarks/bench_dp.py [--n 4096] [--repeat 3]

Set WALKLAB_BACKEND=numpy (or =native) before importing walklab to force a
backend; this script instead reloads the dp module under each setting so a
single invocation times both.
"""
from __future__ import annotations

import argparse
import importlib
import os
import time


def _timed(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(backend: str, n: int, repeat: int) -> float:
    os.environ["WALKLAB_BACKEND"] = backend
    import walklab.dp as dp
    importlib.reload(dp)
    assert dp.backend_name() == backend, (
        f"backend {backend!r} unavailable (got {dp.backend_name()!r})")
    import walklab.engine as engine
    importlib.reload(engine)
    from walklab import build_law

    law = build_law([(-2, "1/6"), (-1, "1/6"), (0, "1/6"), (1, "1/2")], "l1")

    def run():
        engine.absorbed_at_origin(law, 5, n)
        engine.absorbed_on_halfline(law, 5, n)

    return _timed(run, repeat)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=4096, help="number of DP steps")
    ap.add_argument("--repeat", type=int, default=3,
                    help="repetitions; best time is reported")
    args = ap.parse_args()

    results = {}
    for backend in ("numpy", "native"):
        try:
            results[backend] = bench(backend, args.n, args.repeat)
        except AssertionError as exc:
            print(f"{backend:>7}: skipped ({exc})")

    for backend, secs in results.items():
        print(f"{backend:>7}: {secs:8.3f} s  (n={args.n}, best of "
              f"{args.repeat})")
    if len(results) == 2:
        print(f"speedup: {results['numpy'] / results['native']:.2f}x "
              f"(native over numpy)")


if __name__ == "__main__":
    main()
