"""Generic permutation-test machinery.

A test draws B uniform permutations, recomputes its statistic on each
permuted dataset, ranks the observed value among all B+1 values breaking
ties at random, and rejects when

    R >= (1 - alpha) (B + 1) + 1.

Under exchangeability the rejection probability is exactly
floor(alpha (B + 1)) / (B + 1) for any statistic.

Reproducibility contract: every random quantity is drawn from a
counter-based stream derived from (seed, purpose, replicate index), so
results are identical no matter how replicates are scheduled.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

# stream-derivation domains; replicate indexes are appended after the domain
DOM_TRANSFORM = 1
DOM_PERM = 2
DOM_TIEBREAK = 3
DOM_IMPUTE = 4
DOM_DATA = 5


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent counter-based generator for (seed, path)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=path)))


@dataclass(frozen=True)
class TestReport:
    """Outcome of one hypothesis test."""

    method: str
    n: int
    B: int
    statistic: float
    rank: int | None
    p_value: float
    alpha: float
    rejected: bool
    seed: int
    runtime_ms: float

    def to_dict(self, include_runtime: bool = True) -> dict:
        d = {
            "method": self.method,
            "n": self.n,
            "B": self.B,
            "statistic": self.statistic,
            "rank": self.rank,
            "p": self.p_value,
            "alpha": self.alpha,
            "rejected": self.rejected,
            "seed": self.seed,
        }
        if include_runtime:
            d["runtime_ms"] = self.runtime_ms
        return d

    def to_json(self, include_runtime: bool = True) -> str:
        return json.dumps(self.to_dict(include_runtime=include_runtime))


def rank_with_random_ties(values, index: int, rng: np.random.Generator) -> int:
    """1-based ascending rank of values[index], ties shuffled uniformly."""
    values = np.asarray(values, dtype=np.float64)
    if len(values) == 0:
        raise ValueError("empty value list")
    if not 0 <= index < len(values):
        raise ValueError("index out of range")
    keys = rng.random(len(values))
    order = np.lexsort((keys, values))
    return int(np.nonzero(order == index)[0][0]) + 1


def build_report(
    observed: float,
    perm_values: np.ndarray,
    *,
    B: int,
    alpha: float,
    seed: int,
    method: str,
    n: int,
    started: float,
) -> TestReport:
    """Rank the observed statistic and assemble the report."""
    values = np.concatenate(([observed], perm_values))
    rank = rank_with_random_ties(values, 0, substream(seed, DOM_TIEBREAK))
    p = (B + 2 - rank) / (B + 1)
    p = min(max(p, 1.0 / (B + 1)), 1.0)
    # the displayed rule R >= (1-alpha)(B+1)+1, written so float rounding
    # cannot flip an exact-integer threshold
    rejected = (B + 2 - rank) <= alpha * (B + 1) + 1e-9
    return TestReport(
        method=method,
        n=n,
        B=B,
        statistic=float(observed),
        rank=rank,
        p_value=float(p),
        alpha=float(alpha),
        rejected=bool(rejected),
        seed=int(seed),
        runtime_ms=(time.perf_counter() - started) * 1000.0,
    )


def permutation_test(
    d,
    stat,
    permute,
    *,
    B: int,
    alpha: float,
    seed: int,
    method: str = "custom",
    n: int | None = None,
) -> TestReport:
    """Permutation test with an arbitrary statistic and permutation rule.

    `stat(dataset) -> float`; `permute(dataset, perm) -> dataset` applies an
    index permutation.  Statistic failures on a replicate are re-raised with
    the replicate index attached.
    """
    if B < 1:
        raise ValueError("B must be at least 1")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    started = time.perf_counter()
    size = n if n is not None else d.n
    observed = float(stat(d))
    perm_values = np.empty(B)
    for b in range(B):
        perm = substream(seed, DOM_PERM, b).permutation(size)
        try:
            perm_values[b] = stat(permute(d, perm))
        except Exception as exc:
            raise RuntimeError(f"statistic failed on permutation replicate {b}: {exc}") from exc
    return build_report(
        observed, perm_values, B=B, alpha=alpha, seed=seed, method=method, n=size, started=started
    )
