"""Benchmark the jitted permutation kernels against the pure-numpy fallback.

Run:  python3 benchmarks/bench_accel.py [--sizes 200,500,1000] [--perms 200]

Both implementations live in survot._accel; this script times them side by
side and also times one full transport-based test on each backend selected
path (the jitted one only when numba is importable and not disabled).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from survot import CensoredDataset, km_weights, substream
from survot._accel import (
    BACKEND,
    HAS_NUMBA,
    _quad_perm_sum_numpy,
    _whsic_perm_numpy,
)
from survot.kernels import gram

if HAS_NUMBA:
    from survot._accel import _quad_perm_sum_numba, _whsic_perm_numba


def _time(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(sizes, perms):
    rng = np.random.default_rng(0)
    print(f"selected backend: {BACKEND} (numba available: {HAS_NUMBA})")
    header = f"{'kernel':12s} {'n':>6s} {'numpy':>12s} {'numba':>12s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        x = rng.normal(size=n)
        z = rng.exponential(size=n)
        d = CensoredDataset(x, z, rng.integers(0, 2, n))
        K = np.ascontiguousarray(gram(d.x))
        L = np.ascontiguousarray(gram(d.z))
        w = km_weights(d)
        lw = L @ w
        wlw = float(w @ lw)
        perm = substream(1, 2, 0).permutation(n)

        for label, np_fn, nb_fn, args in (
            ("quad_perm", _quad_perm_sum_numpy, "_quad", (K, L, perm)),
            ("whsic_perm", _whsic_perm_numpy, "_wh", (K, L, w, lw, wlw, perm)),
        ):
            t_np = _time(lambda: [np_fn(*args) for _ in range(perms)], repeats=3) / perms
            if HAS_NUMBA:
                jit_fn = _quad_perm_sum_numba if nb_fn == "_quad" else _whsic_perm_numba
                jit_fn(*args)  # compile outside the timing loop
                t_nb = _time(lambda: [jit_fn(*args) for _ in range(perms)], repeats=3) / perms
                print(f"{label:12s} {n:6d} {t_np*1e6:10.1f}us {t_nb*1e6:10.1f}us {t_np/t_nb:7.1f}x")
            else:
                print(f"{label:12s} {n:6d} {t_np*1e6:10.1f}us {'-':>12s} {'-':>8s}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="200,500,1000")
    parser.add_argument("--perms", type=int, default=100)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    bench(sizes, args.perms)


if __name__ == "__main__":
    main()
