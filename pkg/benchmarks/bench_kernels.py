"""Time the numba kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The first numba call (compilation or cache load) is excluded.
"""
import argparse
import timeit

import numpy as np

from hfreq import _kernels as kr


def cases(rng):
    x = rng.uniform(-6, 6, 4000)
    a, b = rng.uniform(-2, 2, 2000), rng.uniform(-2, 2, 2000)
    y, eta = rng.uniform(-2, 2, 4096), rng.uniform(-2, 2, 4096)
    return [
        ("hermite_table N=60, 4000 pts", lambda: kr.hermite_table_numba(60, x, True),
         lambda: kr._hermite_table_np(60, x, True)),
        ("wigner_table N=24, 2000 pts", lambda: kr.wigner_table_numba(24, 1.0, a, b, True),
         lambda: kr._wigner_table_np(24, 1.0, a, b, True)),
        ("kernel_table kmax=5, nz=256, 4096 pts", lambda: kr.kernel_table_numba(1.0, 1.0, 5, y, eta, 256),
         lambda: kr._kernel_table_np(1.0, 1.0, 5, y, eta, 256)),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':40s} {'numba ms':>10s} {'numpy ms':>10s} {'ratio':>7s} {'max |diff|':>11s}")
    for name, fast, slow in cases(rng):
        diff = float(np.max(np.abs(fast() - slow())))
        tn = min(timeit.repeat(fast, number=1, repeat=args.repeat)) * 1e3
        tp = min(timeit.repeat(slow, number=1, repeat=args.repeat)) * 1e3
        print(f"{name:40s} {tn:10.2f} {tp:10.2f} {tp / tn:7.2f} {diff:11.1e}")


if __name__ == "__main__":
    main()
