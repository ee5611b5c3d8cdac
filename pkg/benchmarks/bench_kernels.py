"""Time the compiled and pure-Python JC kernel sums against each other.

    python benchmarks/bench_kernels.py [--pairs 200] [--taus 201] [--repeat 3]
"""
import argparse
import time

import numpy as np

from catent import kernels


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--taus", type=int, default=201)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=1)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    taus = np.linspace(0.0, 10.0, args.taus)
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)} (default {kernels.BACKEND})")
    print(f"{'|alpha|':>8} {'cutoff':>7} " + " ".join(f"{b + ' [s]':>14}" for b in backends)
          + (f" {'speedup':>9}" if len(backends) == 2 else ""))
    for scale in (1.0, 3.0, 10.0):
        b = scale * np.exp(2j * np.pi * rng.random(args.pairs))
        g = scale * np.exp(2j * np.pi * rng.random(args.pairs))
        times = {bk: best_of(lambda: kernels.coherent_kernels(b, g, taus, backend=bk), args.repeat)
                 for bk in backends}
        line = f"{scale:8.1f} {kernels.truncation(scale ** 2):7d} " + " ".join(
            f"{times[bk]:14.4f}" for bk in backends)
        if len(backends) == 2:
            line += f" {times['python'] / times['compiled']:9.1f}x"
        print(line)
    if len(backends) == 2:
        diff = np.max(np.abs(kernels.coherent_kernels(b, g, taus, backend="compiled")
                             - kernels.coherent_kernels(b, g, taus, backend="python")))
        print(f"max |compiled - python| = {diff:.2e}")


if __name__ == "__main__":
    main()
