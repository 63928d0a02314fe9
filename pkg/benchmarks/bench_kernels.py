"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--size 2048] [--k 5] [--repeat 5]
"""
import argparse
import time

import numpy as np

from kmseg import _kernels_py, kernels
from kmseg.kmeans import cluster_image, lloyd_oracle, flatten_and_shift
from kmseg.pipeline import GrayImage


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--size", type=int, default=2048)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()

    rng = np.random.default_rng(0)
    img = GrayImage(rng.integers(0, 256, size=(args.size, args.size)))
    fi = flatten_and_shift(img)
    centroids = np.linspace(10, 240, args.k)
    counts = _kernels_py.count_levels(fi.values, fi.m)
    cluster_of = _kernels_py.nearest_labels(np.arange(fi.m + 1), centroids).astype(np.int64)

    print(f"{args.size}x{args.size} pixels, k={args.k}, best of {args.repeat}")
    print(f"{'kernel':<22}" + "".join(f"{b:>12}" for b in kernels.available()))
    cases = {
        "count_levels": lambda: kernels.count_levels(fi.values, fi.m),
        "nearest_labels": lambda: kernels.nearest_labels(fi.values, centroids),
        "cluster_moments": lambda: kernels.cluster_moments(counts, cluster_of, args.k),
        "cluster_image": lambda: cluster_image(img, args.k),
    }
    for name, fn in cases.items():
        row = []
        for backend in kernels.available():
            kernels.use(backend)
            row.append(best_of(fn, args.repeat))
        print(f"{name:<22}" + "".join(f"{t * 1e3:>10.2f}ms" for t in row))

    small = GrayImage(img.pixels[:256, :256])
    t = best_of(lambda: lloyd_oracle(flatten_and_shift(small), args.k), 1)
    print(f"{'lloyd_oracle 256x256':<22}{t * 1e3:>10.2f}ms  (reference path, numpy only)")


if __name__ == "__main__":
    main()
