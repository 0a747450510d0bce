"""Hot numeric kernels for the permutation loops.

The statistics recomputed under thousands of covariate permutations reduce
to O(n^2) sums over a permuted gram matrix.  Those sums are implemented
twice: as numba-jitted loops (no temporaries) and as pure-numpy fallbacks.
The jitted path is used when numba imports cleanly; set

    SURVOT_DISABLE_NUMBA=1

to force the numpy path.  ``benchmarks/bench_accel.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np


def _quad_perm_sum_numpy(K: np.ndarray, L: np.ndarray, perm: np.ndarray) -> float:
    """sum_ij K[perm[i], perm[j]] * L[i, j]."""
    Kp = K[np.ix_(perm, perm)]
    return float(np.einsum("ij,ij->", Kp, L))


def _whsic_perm_numpy(
    K: np.ndarray,
    L: np.ndarray,
    w: np.ndarray,
    lw: np.ndarray,
    wlw: float,
    perm: np.ndarray,
) -> float:
    """Weighted dependence statistic with the covariate gram permuted.

    lw = L @ w and wlw = w @ L @ w are permutation-invariant and are
    passed in precomputed.
    """
    Kp = K[np.ix_(perm, perm)]
    kw = Kp @ w
    t1 = float(w @ ((Kp * L) @ w))
    t2 = float((w * kw) @ lw)
    t3 = float(w @ kw) * wlw
    return t1 - 2.0 * t2 + t3


_DISABLED = os.environ.get("SURVOT_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

if not _DISABLED:
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:  # pragma: no cover - depends on environment
        HAS_NUMBA = False
else:
    HAS_NUMBA = False


if HAS_NUMBA:

    @njit(cache=True)
    def _quad_perm_sum_numba(K, L, perm):  # pragma: no cover - compiled
        n = perm.shape[0]
        total = 0.0
        for i in range(n):
            Krow = K[perm[i]]
            Lrow = L[i]
            s = 0.0
            for j in range(n):
                s += Krow[perm[j]] * Lrow[j]
            total += s
        return total

    @njit(cache=True)
    def _whsic_perm_numba(K, L, w, lw, wlw, perm):  # pragma: no cover - compiled
        n = perm.shape[0]
        t1 = 0.0
        t2 = 0.0
        s_tot = 0.0
        for i in range(n):
            Krow = K[perm[i]]
            Lrow = L[i]
            ui = 0.0
            ti = 0.0
            for j in range(n):
                a = Krow[perm[j]]
                wj = w[j]
                ui += a * wj
                ti += a * wj * Lrow[j]
            t1 += w[i] * ti
            t2 += w[i] * ui * lw[i]
            s_tot += w[i] * ui
        return t1 - 2.0 * t2 + s_tot * wlw

    quad_perm_sum = _quad_perm_sum_numba
    whsic_perm = _whsic_perm_numba
    BACKEND = "numba"
else:
    quad_perm_sum = _quad_perm_sum_numpy
    whsic_perm = _whsic_perm_numpy
    BACKEND = "numpy"
