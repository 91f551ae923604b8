"""Time the numba kernels against the pure Python/NumPy fallback.

Run ``python3 benchmarks/bench_kernels.py [--repeat 3]``.  Each case also
checks that both paths produce identical output.
"""

import argparse
import time

import numpy as np

from graphonlab import affine, named_graph, sample
from graphonlab.hom import hom_count
from graphonlab.rng import uniform_np


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    W = affine()
    for n in (200, 800):
        yield f"sample n={n}", lambda nb, n=n: sample(W, n, 11, use_numba=nb).bits.tobytes()
    for name, n in (("K3", 60), ("P3", 60), ("C4", 40)):
        host = sample(W, n, 5)
        F = named_graph(name)
        yield f"inj count {name} n={n}", lambda nb, F=F, host=host: hom_count(F, host, "inj", use_numba=nb)
    host = sample(W, 30, 5)
    yield "ind count C4 n=30", lambda nb: hom_count(named_graph("C4"), host, "ind", use_numba=nb)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    # warm the JIT and the RNG once
    sample(affine(), 10, 0, use_numba=True)
    uniform_np(0, 1, np.arange(4, dtype=np.uint64), np.zeros(4, dtype=np.uint64))
    print(f"{'case':<24}{'numba s':>10}{'fallback s':>12}{'speedup':>9}  same")
    for label, fn in cases():
        fn(True)
        t_nb, out_nb = best_of(lambda: fn(True), args.repeat)
        t_py, out_py = best_of(lambda: fn(False), max(1, args.repeat // 3))
        print(f"{label:<24}{t_nb:>10.4f}{t_py:>12.4f}{t_py / t_nb:>9.1f}  {out_nb == out_py}")


if __name__ == "__main__":
    main()
