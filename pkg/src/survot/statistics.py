"""Scalar dependence and two-sample statistics.

The kernel statistics are squared RKHS distances between an empirical (or
reweighted) joint embedding and the matching product-of-marginals or
second-sample embedding.  They are computed from gram matrices in O(n^2)
through row sums; the O(n^3) triple sums are never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import CensoredDataset, DataError, TwoSampleDataset
from .kaplan_meier import km_weight_vector
from .kernels import gram


class DegenerateDataError(DataError):
    """The statistic is undefined on this input (constant covariate, no events...)."""


class ConvergenceError(RuntimeError):
    """Iterative fit failed to converge."""


def _hsic_from_grams(K: np.ndarray, L: np.ndarray) -> float:
    n = K.shape[0]
    kr = K.sum(axis=1)
    lr = L.sum(axis=1)
    t1 = float(np.einsum("ij,ij->", K, L)) / n**2
    t2 = float(kr.sum()) * float(lr.sum()) / n**4
    t3 = 2.0 * float(kr @ lr) / n**3
    return t1 + t2 - t3


def hsic_biased(x, y) -> float:
    """Biased dependence estimate between two real samples (distance kernel).

    Equals (1/n^2) sum K_ij L_ij + (1/n^2 sum K)(1/n^2 sum L)
    - (2/n^3) sum_i (sum_j K_ij)(sum_r L_ir).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) != len(y):
        raise DataError("length mismatch")
    if len(x) < 2:
        raise DataError("need at least 2 observations")
    return _hsic_from_grams(gram(x), gram(y))


def _whsic_from_grams(K: np.ndarray, L: np.ndarray, w: np.ndarray) -> float:
    # tr(H_w K H_w L) with H_w = diag(w) - w w^T, expanded so only
    # matrix-vector products appear.
    kw = K @ w
    lw = L @ w
    t1 = float(w @ ((K * L) @ w))
    t2 = float((w * kw) @ lw)
    t3 = float(w @ kw) * float(w @ lw)
    return t1 - 2.0 * t2 + t3


def whsic(x, z, w) -> float:
    """Weighted dependence estimate; uniform weights recover hsic_biased."""
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if not (len(x) == len(z) == len(w)):
        raise DataError("length mismatch")
    return _whsic_from_grams(gram(x), gram(z), w)


def zhsic(x, z) -> float:
    """Dependence between covariates and observed times, censoring ignored."""
    return hsic_biased(x, z)


def wmmd_two_sample(ts: TwoSampleDataset, w0, w1) -> float:
    """Squared distance between the weighted min-kernel embeddings of the groups."""
    w0 = np.asarray(w0, dtype=np.float64)
    w1 = np.asarray(w1, dtype=np.float64)
    if len(w0) != ts.n0 or len(w1) != ts.n1:
        raise DataError("weight length mismatch")
    z = np.concatenate([ts.z0, ts.z1])
    G = gram(z, "min")
    signed = np.concatenate([w0, -w1])
    return float(signed @ G @ signed)


class LogrankEngine:
    """Precomputed tabulation of a pooled sample; the statistic is then
    O(n) per group labeling, which the permutation test exploits."""

    def __init__(self, z, delta):
        z = np.asarray(z, dtype=np.float64)
        delta = np.asarray(delta, dtype=np.int64)
        order = np.lexsort((np.arange(len(z)), -delta, z))
        self.z = z[order]
        self.delta = delta[order]
        self.order = order
        self.n = len(z)
        uniq, ids = np.unique(self.z, return_inverse=True)
        self.ids = ids
        self.n_times = len(uniq)
        counts = np.bincount(ids, minlength=self.n_times)
        # at risk at time j = everyone with z >= uniq[j]
        self.at_risk = self.n - (np.cumsum(counts) - counts)
        self.deaths = np.bincount(ids[self.delta == 1], minlength=self.n_times)
        self.event_ids = ids[self.delta == 1]

    def statistic(self, group: np.ndarray, strict: bool = True) -> float:
        """Chi-square statistic for labels aligned with the constructor input."""
        g = np.asarray(group, dtype=np.float64)[self.order]
        at_risk1 = np.bincount(self.ids, weights=g, minlength=self.n_times)
        at_risk1 = np.cumsum(at_risk1[::-1])[::-1]
        deaths1 = np.bincount(self.event_ids, weights=g[self.delta == 1], minlength=self.n_times)
        d = self.deaths
        nr = self.at_risk
        mask = (d > 0) & (nr > 1)
        frac = at_risk1[mask] / nr[mask]
        dm = d[mask]
        observed_minus_expected = float((deaths1[mask] - dm * frac).sum())
        variance = float((dm * frac * (1.0 - frac) * (nr[mask] - dm) / (nr[mask] - 1.0)).sum())
        if variance <= 0.0:
            if strict:
                raise DegenerateDataError("logrank variance is zero; statistic undefined")
            return 0.0
        return observed_minus_expected**2 / variance


def logrank(ts: TwoSampleDataset) -> float:
    """Classical two-sample chi-square statistic over distinct event times."""
    if ts.delta0.sum() + ts.delta1.sum() == 0:
        raise DegenerateDataError("no observed events")
    z = np.concatenate([ts.z0, ts.z1])
    delta = np.concatenate([ts.delta0, ts.delta1])
    group = np.concatenate([np.zeros(ts.n0), np.ones(ts.n1)])
    return LogrankEngine(z, delta).statistic(group)


@dataclass(frozen=True)
class CoxFit:
    beta: float
    stderr: float
    score_stat: float
    wald_stat: float
    loglik: float
    iterations: int
    converged: bool


def _cox_tables(x, z, delta):
    """Per distinct event time: risk-set start index, death count, covariate sum."""
    event_mask = delta == 1
    event_times = z[event_mask]
    uniq, inv, d_j = np.unique(event_times, return_inverse=True, return_counts=True)
    starts = np.searchsorted(z, uniq, side="left")
    sx_j = np.bincount(inv, weights=x[event_mask], minlength=len(uniq))
    return starts, d_j.astype(np.float64), sx_j


def _cox_quantities(x, tables, beta):
    """(loglik, score, information) of the single-covariate partial likelihood
    with Breslow handling of tied event times."""
    starts, d_j, sx_j = tables
    eta = beta * x
    shift = eta.max()
    e = np.exp(eta - shift)
    s0 = np.cumsum(e[::-1])[::-1]
    s1 = np.cumsum((x * e)[::-1])[::-1]
    s2 = np.cumsum((x * x * e)[::-1])[::-1]
    r0 = s0[starts]
    r1 = s1[starts] / r0
    r2 = s2[starts] / r0
    loglik = float((beta * sx_j - d_j * (np.log(r0) + shift)).sum())
    score = float((sx_j - d_j * r1).sum())
    info = float((d_j * (r2 - r1**2)).sum())
    return loglik, score, info


def cox_fit_score(d: CensoredDataset, max_iter: int = 50, tol: float = 1e-10) -> CoxFit:
    """Newton-Raphson fit of the proportional-hazards coefficient.

    Returns the estimate, its standard error from the observed information,
    the score statistic at zero and the Wald statistic.
    """
    x, z, delta = d.x, d.z, d.delta
    if delta.sum() == 0:
        raise DegenerateDataError("no observed events")
    if np.ptp(x) == 0.0:
        raise DegenerateDataError("degenerate covariate (constant)")
    tables = _cox_tables(x, z, delta)
    _, score0, info0 = _cox_quantities(x, tables, 0.0)
    if info0 <= 0.0:
        raise DegenerateDataError("degenerate covariate (no information at zero)")
    score_stat = score0**2 / info0

    beta = 0.0
    scale = max(1.0, float(np.abs(x).max()))
    converged = False
    iterations = 0
    loglik = score = info = 0.0
    for iterations in range(1, max_iter + 1):
        loglik, score, info = _cox_quantities(x, tables, beta)
        if abs(score) < tol:
            converged = True
            break
        if info <= 0.0:
            raise ConvergenceError("non-positive information; cannot step")
        beta += score / info
        if abs(beta) > 500.0 / scale:
            raise ConvergenceError("monotone partial likelihood (perfect separation?)")
    if not converged:
        raise ConvergenceError(f"no convergence after {max_iter} iterations")
    # a vanishing Hessian at the "optimum" means the likelihood is still
    # rising at infinity (perfect separation), not that a maximizer was found
    if info < 1e-8 * info0:
        raise ConvergenceError("monotone partial likelihood (perfect separation?)")
    stderr = 1.0 / np.sqrt(info)
    wald = beta**2 * info
    return CoxFit(
        beta=float(beta),
        stderr=float(stderr),
        score_stat=float(score_stat),
        wald_stat=float(wald),
        loglik=float(loglik),
        iterations=iterations,
        converged=converged,
    )


def cox_partial_loglik(d: CensoredDataset, beta: float) -> float:
    """Partial log-likelihood at a fixed coefficient (for grid oracles)."""
    return _cox_quantities(d.x, _cox_tables(d.x, d.z, d.delta), float(beta))[0]


def signed_group_weights(delta: np.ndarray, group: np.ndarray) -> np.ndarray:
    """Per-row weights (+ within group 0, - within group 1) for pooled,
    canonically sorted (z, delta) arrays under an arbitrary labeling."""
    w = np.zeros(len(delta))
    for label, sign in ((0, 1.0), (1, -1.0)):
        m = group == label
        if m.any():
            w[m] = sign * km_weight_vector(delta[m])
    return w
