"""Scalar kernels and gram matrices used by the dependence statistics.

Two kernels are supported: the distance-induced kernel
k(x, x') = |x| + |x'| - |x - x'| on the real line (no 1/2 factor; the
scale only rescales the statistics) and the min-kernel k(a, b) = min(a, b)
on the nonnegative half-line.
"""

from __future__ import annotations

import numpy as np

from .data import DataError

KERNELS = ("distance", "min")


def distance_kernel(x: float, xp: float) -> float:
    return abs(x) + abs(xp) - abs(x - xp)


def min_kernel(a: float, b: float) -> float:
    if a < 0 or b < 0:
        raise DataError("min-kernel inputs must be nonnegative")
    return min(a, b)


def gram(values, kernel: str = "distance") -> np.ndarray:
    """Dense symmetric kernel matrix M[i, j] = kernel(v[i], v[j])."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or len(v) == 0:
        raise DataError("gram expects a nonempty one-dimensional array")
    if kernel == "distance":
        av = np.abs(v)
        return av[:, None] + av[None, :] - np.abs(v[:, None] - v[None, :])
    if kernel == "min":
        if (v < 0).any():
            raise DataError("min-kernel inputs must be nonnegative")
        return np.minimum(v[:, None], v[None, :])
    raise ValueError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")
