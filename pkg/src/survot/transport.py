"""Discrete 1-D optimal transport and the censored-to-synthetic transformation.

Between uniform distributions on two real multisets the monotone coupling
(sorted values paired by quantile) is optimal for the absolute-value ground
cost, so no linear program is needed.  The transformation walks the dataset
in time order; at every observed event it couples "uniform on the covariates
still at risk" with "uniform on the covariates not yet assigned", samples a
synthetic covariate conditional on the event's covariate, and assigns it the
event time.  Covariates left over at the end receive the last time seen.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .data import CensoredDataset, DataError, RiskSet, SyntheticDataset, _readonly


@dataclass(frozen=True, eq=False)
class Coupling:
    """Joint mass matrix over two sorted multisets with uniform marginals.

    Rows sum to 1/a (a source atoms) and columns to 1/l (l target atoms);
    atom counts may differ once censoring has removed more source than
    target members.
    """

    source: np.ndarray
    target: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "source", _readonly(np.asarray(self.source, dtype=np.float64)))
        object.__setattr__(self, "target", _readonly(np.asarray(self.target, dtype=np.float64)))
        object.__setattr__(self, "mass", _readonly(np.asarray(self.mass, dtype=np.float64)))

    def cost(self) -> float:
        """Expected transport distance sum_ab P_ab |s_a - t_b|."""
        return float(
            (self.mass * np.abs(self.source[:, None] - self.target[None, :])).sum()
        )

    def conditional(self, slot: int) -> np.ndarray:
        """Distribution over target atoms given the source atom at `slot`."""
        row = self.mass[slot]
        total = row.sum()
        if total <= 0:
            raise DataError(f"source slot {slot} carries no mass")
        return row / total


def _values(obj) -> np.ndarray:
    if isinstance(obj, RiskSet):
        return obj.values
    return np.sort(np.asarray(obj, dtype=np.float64))


def monotone_coupling(source, target) -> Coupling:
    """Quantile coupling of uniform distributions on two sorted multisets.

    Source atom u occupies the quantile interval (u/a, (u+1)/a]; its mass is
    spread over the target atoms whose intervals (v/l, (v+1)/l] overlap it.
    """
    s = _values(source)
    t = _values(target)
    a, l = len(s), len(t)
    if a == 0 or l == 0:
        raise DataError("cannot couple empty multisets")
    mass = np.zeros((a, l))
    u = v = 0
    pos = 0.0
    while u < a and v < l:
        upper_s = (u + 1) / a
        upper_t = (v + 1) / l
        upper = min(upper_s, upper_t)
        mass[u, v] += upper - pos
        pos = upper
        if upper_s <= upper_t:
            u += 1
        if upper_t <= upper_s:
            v += 1
    return Coupling(s, t, mass)


def sample_conditional(coupling: Coupling, x: float, rng: np.random.Generator) -> float:
    """Draw a target value given source value x (its first slot if duplicated).

    Consumes exactly one uniform variate.
    """
    slot = int(np.searchsorted(coupling.source, x, side="left"))
    if slot >= len(coupling.source) or coupling.source[slot] != x:
        raise DataError(f"value {x!r} not in coupling source")
    probs = coupling.conditional(slot)
    cdf = np.cumsum(probs)
    j = int(np.searchsorted(cdf, rng.random(), side="right"))
    return float(coupling.target[min(j, len(cdf) - 1)])


@dataclass(frozen=True, eq=False)
class TransformTrace:
    """One record per observed event, plus the terminal time that the
    unassigned covariates received."""

    event_time: np.ndarray
    event_covariate: np.ndarray
    synthetic_covariate: np.ndarray
    risk_size: np.ndarray
    pool_size: np.ndarray
    z_last: float

    def __post_init__(self):
        for name in ("event_time", "event_covariate", "synthetic_covariate"):
            object.__setattr__(self, name, _readonly(np.asarray(getattr(self, name), dtype=np.float64)))
        for name in ("risk_size", "pool_size"):
            object.__setattr__(self, name, _readonly(np.asarray(getattr(self, name), dtype=np.int64)))

    @property
    def n_events(self) -> int:
        return len(self.event_time)

    def save_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("event_time", "event_covariate", "synthetic_covariate", "risk_size", "pool_size"))
            for row in zip(
                self.event_time, self.event_covariate, self.synthetic_covariate, self.risk_size, self.pool_size
            ):
                writer.writerow([repr(float(row[0])), repr(float(row[1])), repr(float(row[2])), int(row[3]), int(row[4])])


def opt_transform(d: CensoredDataset, rng: np.random.Generator) -> tuple[SyntheticDataset, TransformTrace]:
    """Turn a censored dataset into a fully observed synthetic one.

    The returned dataset lists the event rows first (in time order) and then
    the leftover covariates, all carrying the final observed time.  The
    covariate multiset is preserved exactly; exactly one uniform variate is
    consumed per observed event.
    """
    x, z, delta = d.x, d.z, d.delta
    n = d.n
    # risk set as parallel (value, original row) lists sorted by (value, row)
    order = np.lexsort((np.arange(n), x))
    ar_vals: list[float] = [float(v) for v in x[order]]
    ar_rows: list[int] = [int(r) for r in order]
    pool: list[float] = sorted(float(v) for v in x)

    syn_y: list[float] = []
    trace_t: list[float] = []
    trace_x: list[float] = []
    trace_y: list[float] = []
    trace_a: list[int] = []
    trace_l: list[int] = []

    for i in range(n):
        xi = float(x[i])
        lo = bisect_left(ar_vals, xi)
        hi = lo
        while hi < len(ar_vals) and ar_vals[hi] == xi:
            hi += 1
        # rows are ascending within an equal-value block, so this lands on row i
        slot = bisect_left(ar_rows, i, lo, hi)
        if delta[i] == 1:
            a = len(ar_vals)
            l = len(pool)
            # one uniform draw on the slot's quantile interval, mapped through
            # the target quantile partition
            r = (slot + rng.random()) / a
            v = min(int(r * l), l - 1)
            y = pool[v]
            syn_y.append(y)
            trace_t.append(float(z[i]))
            trace_x.append(xi)
            trace_y.append(y)
            trace_a.append(a)
            trace_l.append(l)
            del pool[v]
        del ar_vals[slot]
        del ar_rows[slot]

    z_last = float(z[-1])
    times = trace_t + [z_last] * len(pool)
    covs = syn_y + pool
    synthetic = SyntheticDataset(np.array(covs), np.array(times))
    trace = TransformTrace(
        event_time=np.array(trace_t),
        event_covariate=np.array(trace_x),
        synthetic_covariate=np.array(trace_y),
        risk_size=np.array(trace_a, dtype=np.int64),
        pool_size=np.array(trace_l, dtype=np.int64),
        z_last=z_last,
    )
    return synthetic, trace
