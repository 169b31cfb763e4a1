"""Time the compiled kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Cases cover the candidate search at the sizes used by the planted sweep and
the MovieLens run, plus the brute-force partition search. Both backends are
checked for identical labels before timing.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from bccbil import _backend, generate_planted, truncated_svd
from bccbil.epsnet import Sampled, plan_candidates


def _search_case(m, n, r, k, budget, seed=0):
    g, _ = generate_planted(m, n, min(k, 5), 0.2, seed)
    f = truncated_svd(g, r)
    us = np.ascontiguousarray(f.scaled_u)
    v = np.ascontiguousarray(f.v_factor)
    cands = np.ascontiguousarray(plan_candidates(r, k, Sampled(budget), seed).batch(0, budget))

    def run(kern):
        x = np.empty((budget, m), dtype=np.int64)
        y = np.empty((budget, n), dtype=np.int64)
        obj = np.empty(budget)
        kern.evaluate_candidates(us, v, cands, x, y, obj)
        return x, y, obj

    return f"search {m}x{n} r={r} k={k} x{budget}", run


def _exact_case(m, n, k, seed=0):
    g, _ = generate_planted(m, n, 2, 0.3, seed)
    w = np.ascontiguousarray(g.weights)

    def run(kern):
        return kern.exact_max_trace(w, k)

    return f"exact {m}x{n} k={k}", run


CASES = [
    lambda: _search_case(100, 50, 5, 5, 10_000),
    lambda: _search_case(20, 10, 5, 5, 2_000),
    lambda: _search_case(943, 1682, 4, 10, 500),
    lambda: _exact_case(4, 5, 3),
    lambda: _exact_case(5, 5, 3),
]


def _best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _same(a, b):
    if isinstance(a, tuple) and len(a) == 3:
        return np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]) and np.allclose(a[2], b[2], atol=1e-9)
    return a[0] == b[0] and list(a[1]) == list(b[1])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="compiled vs NumPy kernel timings")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", help="also write the table as JSON")
    args = parser.parse_args(argv)

    if "cython" not in _backend.available():
        print("compiled extension not built; run `pip install -e . --no-build-isolation` first", file=sys.stderr)
        return 1
    ext, py = _backend.load("cython"), _backend.load("python")
    rows = []
    print(f"{'case':<34} {'cython ms':>10} {'python ms':>10} {'speedup':>8}")
    for make in CASES:
        name, run = make()
        if not _same(run(ext), run(py)):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 2
        tc = _best_time(lambda: run(ext), args.repeat)
        tp = _best_time(lambda: run(py), args.repeat)
        rows.append({"case": name, "cython_ms": tc * 1e3, "python_ms": tp * 1e3, "speedup": tp / tc})
        print(f"{name:<34} {tc * 1e3:>10.1f} {tp * 1e3:>10.1f} {tp / tc:>7.1f}x")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
