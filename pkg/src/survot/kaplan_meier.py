"""Kaplan-Meier estimation and the derived inverse-censoring weights.

For a canonical dataset (sorted by time, events first at ties) the
product-limit curve after row k is

    S(z_k) = prod_{i<=k} ((n - i) / (n - i + 1))^{delta_i}      (i is 1-based)

applied to the event indicators for the lifetime distribution, or to the
flipped indicators (1 - delta) for the censoring distribution.  The weight
of row k is the mass the lifetime curve drops there:

    w_k = prod_{i<k} ((n - i) / (n - i + 1))^{delta_i} / (n - k + 1)   if delta_k = 1
    w_k = 0                                                            otherwise

so censored rows carry no mass and, on tie-free data, w_k equals
1 / (n * P(C > z_k-)) with P estimated from the flipped indicators.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .data import CensoredDataset, TwoSampleDataset, _readonly


@dataclass(frozen=True, eq=False)
class SurvivalCurve:
    """Right-continuous step function with one step per data row."""

    times: np.ndarray
    survival: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "times", _readonly(np.asarray(self.times, dtype=np.float64)))
        object.__setattr__(self, "survival", _readonly(np.asarray(self.survival, dtype=np.float64)))

    def evaluate(self, t):
        """S(t): the product over all rows with time <= t."""
        idx = np.searchsorted(self.times, t, side="right") - 1
        return np.where(idx < 0, 1.0, self.survival[np.maximum(idx, 0)])[()]

    def evaluate_left(self, t):
        """S(t-): the product over rows with time strictly below t."""
        idx = np.searchsorted(self.times, t, side="left") - 1
        return np.where(idx < 0, 1.0, self.survival[np.maximum(idx, 0)])[()]

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("time", "survival"))
            for t, s in zip(self.times, self.survival):
                writer.writerow([repr(float(t)), repr(float(s))])


def _survival_products(delta: np.ndarray) -> np.ndarray:
    n = len(delta)
    k = np.arange(1, n + 1, dtype=np.float64)
    factors = np.where(delta == 1, (n - k) / (n - k + 1.0), 1.0)
    return np.cumprod(factors)


def km_survival(d: CensoredDataset, target: str = "lifetime") -> SurvivalCurve:
    """Product-limit curve of the lifetime or the censoring distribution."""
    if target == "lifetime":
        delta = d.delta
    elif target == "censoring":
        delta = 1 - d.delta
    else:
        raise ValueError(f"unknown target {target!r}; expected 'lifetime' or 'censoring'")
    return SurvivalCurve(d.z, _survival_products(delta))


def km_weight_vector(delta) -> np.ndarray:
    """Weights aligned with a canonically sorted group, from indicators alone."""
    delta = np.asarray(delta, dtype=np.int64)
    n = len(delta)
    surv = _survival_products(delta)
    before = np.concatenate(([1.0], surv[:-1]))
    k = np.arange(1, n + 1, dtype=np.float64)
    return np.where(delta == 1, before / (n - k + 1.0), 0.0)


def km_weights(d: CensoredDataset) -> np.ndarray:
    return km_weight_vector(d.delta)


def km_weights_within_groups(ts: TwoSampleDataset) -> tuple[np.ndarray, np.ndarray]:
    return km_weight_vector(ts.delta0), km_weight_vector(ts.delta1)


def km_distribution(z, delta) -> tuple[np.ndarray, np.ndarray]:
    """Discrete law implied by the product-limit fit on (z, delta).

    Atoms sit at the rows where the curve drops; any leftover mass (the
    curve not reaching zero because the largest observation is censored)
    is assigned to the largest observation, so the result is a proper
    distribution usable for sampling.
    """
    z = np.asarray(z, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.int64)
    order = np.lexsort((np.arange(len(z)), -delta, z))
    z = z[order]
    delta = delta[order]
    w = km_weight_vector(delta)
    atoms = z[delta == 1]
    masses = w[delta == 1]
    leftover = 1.0 - masses.sum()
    if leftover > 1e-15:
        atoms = np.concatenate([atoms, [z[-1]]])
        masses = np.concatenate([masses, [leftover]])
    uniq, inv = np.unique(atoms, return_inverse=True)
    probs = np.bincount(inv, weights=masses, minlength=len(uniq))
    return uniq, probs
