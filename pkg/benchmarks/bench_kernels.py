"""Benchmark the compiled window-distance kernel against the pure-Python
fallback on realistic window/label sizes.

Usage: python3 benchmarks/bench_kernels.py [--pairs N] [--repeat R]
"""

import argparse
import random
import statistics
import time

from sayrea.kernels import USING_COMPILED, _ckernels, window_distance


def make_pairs(n, rng):
    vocab = [f"tok{i}" for i in range(40)]
    pairs = []
    for _ in range(n):
        window = [rng.choice(vocab) for _ in range(rng.randint(5, 20))]
        label = [rng.choice(vocab) for _ in range(rng.randint(2, 8))]
        pairs.append((window, label))
    return pairs


def bench(pairs, repeat, compiled):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        for window, label in pairs:
            window_distance(window, label, compiled=compiled)
        times.append(time.perf_counter() - start)
    return min(times), statistics.median(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = random.Random(42)
    pairs = make_pairs(args.pairs, rng)

    print(f"compiled extension in use by default: {USING_COMPILED}")
    pure_best, pure_med = bench(pairs, args.repeat, compiled=False)
    print(f"pure-python : best {pure_best:.4f}s  median {pure_med:.4f}s "
          f"({args.pairs / pure_best:,.0f} pairs/s)")

    if _ckernels is None:
        print("compiled kernel not built; skipping comparison")
        return

    comp_best, comp_med = bench(pairs, args.repeat, compiled=True)
    print(f"compiled    : best {comp_best:.4f}s  median {comp_med:.4f}s "
          f"({args.pairs / comp_best:,.0f} pairs/s)")
    print(f"speedup     : {pure_best / comp_best:.1f}x")

    mismatches = sum(
        1 for w, l in pairs[:2000]
        if window_distance(w, l, compiled=True) != window_distance(w, l, compiled=False))
    print(f"agreement check on 2000 pairs: {2000 - mismatches}/2000")


if __name__ == "__main__":
    main()
