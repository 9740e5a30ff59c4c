#!/usr/bin/env python3
"""Compare the compiled and pure-Python rasterization kernels.

Renders a batch of generated words through both fill_mask implementations
and reports wall time per backend plus the speedup.  Usage:

    python3 benchmarks/bench_raster.py [--words 300] [--size 512]
"""

import argparse
import time

import numpy as np

from lsystool import _kernels_py, core, render

try:
    from lsystool import _kernels
except ImportError:
    _kernels = None


def prepare_coords(n_words, size, seed=99):
    grammar = core.default_grammar()
    rng = np.random.default_rng(seed)
    batches = []
    for _ in range(n_words):
        steps = int(rng.integers(3, 6))
        word = core.derive(grammar, steps, int(rng.integers(0, 2**62)))
        segs = render.interpret(word, 27.0, 100.0)
        fitted = render.fit_to_canvas(segs, size, size, 6)
        coords = np.floor(fitted + 0.5).astype(np.int32)
        coords[:, [1, 3]] = (size - 1) - coords[:, [1, 3]]
        batches.append(coords)
    return batches


def bench(kernel, batches, size, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for coords in batches:
            kernel.fill_mask(coords, size, size)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--words", type=int, default=300)
    ap.add_argument("--size", type=int, default=512)
    args = ap.parse_args()

    batches = prepare_coords(args.words, args.size)
    n_segments = sum(b.shape[0] for b in batches)
    print(f"{args.words} words, {n_segments} segments, "
          f"{args.size}x{args.size} canvas")

    t_py = bench(_kernels_py, batches, args.size)
    print(f"python kernel: {t_py:.3f}s "
          f"({n_segments / t_py:,.0f} segments/s)")
    if _kernels is None:
        print("cython kernel: not built")
        return
    t_cy = bench(_kernels, batches, args.size)
    print(f"cython kernel: {t_cy:.3f}s "
          f"({n_segments / t_cy:,.0f} segments/s)")
    print(f"speedup: {t_py / t_cy:.1f}x")

    sample = batches[0]
    assert np.array_equal(_kernels.fill_mask(sample, args.size, args.size),
                          _kernels_py.fill_mask(sample, args.size, args.size))
    print("backends bit-identical on sample: yes")


if __name__ == "__main__":
    main()
