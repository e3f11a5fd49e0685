"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the hot kernels (subset DP, exhaustive enumeration, character-sum
accumulation, exponential-sum scans) on medium-sized instances under both
backends and prints a timing table with speedups. The numba pass includes an
unmeasured warm-up call so JIT compilation is excluded.

Run:

    python benchmarks/bench_backends.py [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from subsetsieve import backend
from subsetsieve.algebra import Zn, add_table, build_field, char_matrix, mul_table, power_table, scalar_table
from subsetsieve.counting import cycle_type_pack
from subsetsieve.sweeps import _hua_ring, _oracle_ring


def _cases():
    z = Zn(64)
    rng = np.random.default_rng(7)
    d_fvals = rng.integers(0, 64, size=60).astype(np.int64)
    add = add_table(z)
    W = char_matrix(z)
    smul = scalar_table(z, 8)
    pack = cycle_type_pack(8)
    f13 = build_field(13, 1)
    weil_args = (13, add_table(f13), mul_table(f13), power_table(f13, 4), char_matrix(f13), 4,
                 3.0 * 13**0.5)
    return {
        "dp_table (q=64, m=60, k<=8)": lambda k: k.dp_table(d_fvals, add, 8),
        "dp_table_zn (n=512, m=512, k<=6)": lambda k: k.dp_table_zn(
            np.arange(512, dtype=np.int64), 512, 6
        ),
        "brute_counts (m=22, k<=8)": lambda k: k.brute_counts(d_fvals[:22], add, 8),
        "charsum_acc (q=64, m=60, k<=8)": lambda k: k.charsum_acc(d_fvals, W, smul, *pack),
        "weil_scan (q=13, d=4)": lambda k: k.weil_scan(*weil_args),
        "hua sweep (n=24, full grid)": lambda _k: _hua_ring(24, 3, True),
        "oracle ring (Z_9, d<=3, c<=1, k<=6)": lambda _k: _oracle_ring("zn", 9, 3, 1, 6),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    results: dict[str, dict[str, float]] = {}
    for name in ("numpy", "numba"):
        try:
            backend.set_backend(name)
        except ImportError:
            print(f"[skip] backend {name} unavailable")
            continue
        ker = backend.kernels()
        for label, fn in _cases().items():
            fn(ker)  # warm-up (JIT compile on the numba pass)
            best = float("inf")
            for _ in range(args.repeats):
                t0 = time.perf_counter()
                fn(ker)
                best = min(best, time.perf_counter() - t0)
            results.setdefault(label, {})[name] = best

    width = max(len(k) for k in results)
    print(f"\n{'kernel':<{width}}  {'numpy':>11}  {'numba':>11}  {'speedup':>8}")
    print("-" * (width + 37))
    for label, times in results.items():
        tn = times.get("numpy")
        tb = times.get("numba")
        s_n = f"{1e3 * tn:9.2f}ms" if tn is not None else "      n/a"
        s_b = f"{1e3 * tb:9.2f}ms" if tb is not None else "      n/a"
        spd = f"{tn / tb:7.1f}x" if tn and tb else "    n/a"
        print(f"{label:<{width}}  {s_n:>11}  {s_b:>11}  {spd:>8}")


if __name__ == "__main__":
    main()
