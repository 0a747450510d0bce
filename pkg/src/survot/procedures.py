"""End-to-end hypothesis tests assembled from the building blocks.

Independence tests (real covariate vs censored lifetime):

* transport-HSIC: transform the censored sample into a synthetic fully
  observed one, then run the standard covariate-permutation test on it.
* weighted HSIC: reweight rows by inverse-censoring weights; valid when
  censoring does not depend on the covariate.
* z-HSIC: ignore censoring and test (x, z) directly; same caveat.
* CPH: Wald significance test of the proportional-hazards coefficient.

Two-sample tests (binary covariate): weighted-MMD label permutation, the
imputation-based label permutation that tolerates group-specific censoring,
and the classical logrank statistic under label permutation.

Permutation loops only ever permute the covariate gram matrix (or the group
labels); time-side grams and fixed weight structures are computed once.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from ._accel import quad_perm_sum, whsic_perm
from .data import CensoredDataset, TwoSampleDataset, _readonly
from .kaplan_meier import km_distribution, km_weights
from .kernels import gram
from .permutation import (
    DOM_IMPUTE,
    DOM_PERM,
    DOM_TRANSFORM,
    TestReport,
    build_report,
    substream,
)
from .statistics import (
    LogrankEngine,
    _hsic_from_grams,
    _whsic_from_grams,
    cox_fit_score,
    signed_group_weights,
)
from .transport import opt_transform

METHODS = ("OPT-HSIC", "WHSIC", "ZHSIC", "WHSIC-2S", "IPX-HSIC", "LOGRANK", "CPH")
TWO_SAMPLE_METHODS = ("WHSIC-2S", "IPX-HSIC", "LOGRANK")

DEFAULT_B = 1999
DEFAULT_ALPHA = 0.05


def permute_covariates(d: CensoredDataset, perm: np.ndarray) -> CensoredDataset:
    """Reassign covariates to rows; times and indicators stay in place."""
    return CensoredDataset(d.x[perm], d.z, d.delta)


def _hsic_permutation_report(
    xv: np.ndarray,
    yv: np.ndarray,
    *,
    B: int,
    alpha: float,
    seed: int,
    method: str,
    started: float,
) -> TestReport:
    n = len(xv)
    K = np.ascontiguousarray(gram(xv))
    L = np.ascontiguousarray(gram(yv))
    kr = K.sum(axis=1)
    lr = L.sum(axis=1)
    const = float(kr.sum()) * float(lr.sum()) / n**4
    observed = _hsic_from_grams(K, L)
    values = np.empty(B)
    for b in range(B):
        perm = substream(seed, DOM_PERM, b).permutation(n)
        quad = quad_perm_sum(K, L, perm)
        values[b] = quad / n**2 + const - 2.0 * float(kr[perm] @ lr) / n**3
    return build_report(observed, values, B=B, alpha=alpha, seed=seed, method=method, n=n, started=started)


def opt_hsic_test(
    d: CensoredDataset, B: int = DEFAULT_B, alpha: float = DEFAULT_ALPHA, seed: int = 0
) -> TestReport:
    """Transform once, then permutation-test the synthetic dataset."""
    started = time.perf_counter()
    synthetic, _ = opt_transform(d, substream(seed, DOM_TRANSFORM))
    return _hsic_permutation_report(
        synthetic.y, synthetic.t, B=B, alpha=alpha, seed=seed, method="OPT-HSIC", started=started
    )


def zhsic_test(
    d: CensoredDataset, B: int = DEFAULT_B, alpha: float = DEFAULT_ALPHA, seed: int = 0
) -> TestReport:
    """Permutation test on (x, z) pairs as if there were no censoring."""
    started = time.perf_counter()
    return _hsic_permutation_report(
        d.x, d.z, B=B, alpha=alpha, seed=seed, method="ZHSIC", started=started
    )


def whsic_test(
    d: CensoredDataset, B: int = DEFAULT_B, alpha: float = DEFAULT_ALPHA, seed: int = 0
) -> TestReport:
    """Covariate-permutation test with inverse-censoring weights.

    The weights attach to (z, delta), which permutation does not move, so
    the weight structure and the time gram are computed once.
    """
    started = time.perf_counter()
    n = d.n
    w = km_weights(d)
    K = np.ascontiguousarray(gram(d.x))
    L = np.ascontiguousarray(gram(d.z))
    lw = L @ w
    wlw = float(w @ lw)
    observed = _whsic_from_grams(K, L, w)
    values = np.empty(B)
    for b in range(B):
        perm = substream(seed, DOM_PERM, b).permutation(n)
        values[b] = whsic_perm(K, L, w, lw, wlw, perm)
    return build_report(observed, values, B=B, alpha=alpha, seed=seed, method="WHSIC", n=n, started=started)


def _pooled(ts: TwoSampleDataset):
    """Canonically sorted pooled (z, delta, group) arrays."""
    z = np.concatenate([ts.z0, ts.z1])
    delta = np.concatenate([ts.delta0, ts.delta1])
    group = np.concatenate([np.zeros(ts.n0, dtype=np.int64), np.ones(ts.n1, dtype=np.int64)])
    order = np.lexsort((np.arange(len(z)), -delta, z))
    return z[order], delta[order], group[order]


def whsic_two_sample_test(
    ts: TwoSampleDataset, B: int = DEFAULT_B, alpha: float = DEFAULT_ALPHA, seed: int = 0
) -> TestReport:
    """Label-permutation test on the weighted min-kernel embedding distance.

    Group membership changes under permutation, so the within-group weights
    are recomputed per replicate; the pooled kernel matrix is fixed.
    """
    started = time.perf_counter()
    z, delta, group = _pooled(ts)
    n = len(z)
    G = gram(z, "min")
    observed = _signed_quadform(G, delta, group)
    values = np.empty(B)
    for b in range(B):
        perm = substream(seed, DOM_PERM, b).permutation(n)
        values[b] = _signed_quadform(G, delta, group[perm])
    return build_report(observed, values, B=B, alpha=alpha, seed=seed, method="WHSIC-2S", n=n, started=started)


def _signed_quadform(G: np.ndarray, delta: np.ndarray, group: np.ndarray) -> float:
    a = signed_group_weights(delta, group)
    return float(a @ G @ a)


@dataclass(frozen=True, eq=False)
class ImputedSample:
    """Completed two-sample data: every row carries its group, an event time
    and one censoring time per group, imputed where unobserved."""

    group: np.ndarray
    t: np.ndarray
    c0: np.ndarray
    c1: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "group", _readonly(np.asarray(self.group, dtype=np.int64)))
        for name in ("t", "c0", "c1"):
            object.__setattr__(self, name, _readonly(np.asarray(getattr(self, name), dtype=np.float64)))

    @property
    def n(self) -> int:
        return len(self.group)


def _draw_exceeding(atoms, probs, threshold, cap, rng: np.random.Generator) -> float:
    """One draw from a discrete law conditioned on exceeding `threshold`;
    falls back to `cap` (the largest observation) when no mass remains."""
    mask = atoms > threshold
    if not mask.any():
        return float(cap)
    p = probs[mask]
    total = p.sum()
    if total <= 0.0:
        return float(cap)
    cdf = np.cumsum(p / total)
    j = int(np.searchsorted(cdf, rng.random(), side="right"))
    return float(atoms[mask][min(j, len(cdf) - 1)])


def ipx_impute(ts: TwoSampleDataset, rng: np.random.Generator) -> ImputedSample:
    """Complete the missing times of a two-sample dataset.

    Three product-limit laws are estimated: each group's censoring
    distribution (from that group's flipped indicators) and the pooled
    lifetime distribution.  A censored row keeps its own censoring time and
    draws a lifetime from the pooled law beyond z; an observed row keeps its
    lifetime and draws its own group's censoring time beyond z; the other
    group's censoring time is always drawn beyond z.
    """
    f_atoms, f_probs = km_distribution(
        np.concatenate([ts.z0, ts.z1]), np.concatenate([ts.delta0, ts.delta1])
    )
    g_laws = []
    caps = []
    for zg, dg in ((ts.z0, ts.delta0), (ts.z1, ts.delta1)):
        g_laws.append(km_distribution(zg, 1 - dg))
        caps.append(float(zg[-1]))
    f_cap = float(max(ts.z0[-1], ts.z1[-1]))

    group = np.concatenate([np.zeros(ts.n0, dtype=np.int64), np.ones(ts.n1, dtype=np.int64)])
    z = np.concatenate([ts.z0, ts.z1])
    delta = np.concatenate([ts.delta0, ts.delta1])
    t = np.empty(len(z))
    c = [np.empty(len(z)), np.empty(len(z))]
    for i in range(len(z)):
        own = int(group[i])
        other = 1 - own
        if delta[i] == 1:
            t[i] = z[i]
            c[own][i] = _draw_exceeding(*g_laws[own], z[i], caps[own], rng)
        else:
            c[own][i] = z[i]
            t[i] = _draw_exceeding(f_atoms, f_probs, z[i], f_cap, rng)
        c[other][i] = _draw_exceeding(*g_laws[other], z[i], caps[other], rng)
    return ImputedSample(group=group, t=t, c0=c[0], c1=c[1])


def ipx_hsic_test(
    ts: TwoSampleDataset, B: int = DEFAULT_B, alpha: float = DEFAULT_ALPHA, seed: int = 0
) -> TestReport:
    """Impute once, then permute labels and re-censor each replicate.

    A permuted row is censored by the imputed censoring time of its new
    group, which keeps the replicate datasets realistic even when the two
    groups are censored differently.
    """
    started = time.perf_counter()
    z, delta, group = _pooled(ts)
    n = len(z)
    observed = _signed_quadform(gram(z, "min"), delta, group)
    imp = ipx_impute(ts, substream(seed, DOM_IMPUTE))
    values = np.empty(B)
    for b in range(B):
        perm = substream(seed, DOM_PERM, b).permutation(n)
        labels = imp.group[perm]
        c_sel = np.where(labels == 0, imp.c0, imp.c1)
        z_new = np.minimum(imp.t, c_sel)
        d_new = (imp.t <= c_sel).astype(np.int64)
        order = np.lexsort((np.arange(n), -d_new, z_new))
        values[b] = _signed_quadform(gram(z_new[order], "min"), d_new[order], labels[order])
    return build_report(observed, values, B=B, alpha=alpha, seed=seed, method="IPX-HSIC", n=n, started=started)


def logrank_test(
    ts: TwoSampleDataset, B: int = DEFAULT_B, alpha: float = DEFAULT_ALPHA, seed: int = 0
) -> TestReport:
    """Label-permutation test on the logrank chi-square statistic."""
    started = time.perf_counter()
    z = np.concatenate([ts.z0, ts.z1])
    delta = np.concatenate([ts.delta0, ts.delta1])
    group = np.concatenate([np.zeros(ts.n0), np.ones(ts.n1)])
    engine = LogrankEngine(z, delta)
    observed = engine.statistic(group, strict=True)
    n = len(z)
    values = np.empty(B)
    for b in range(B):
        perm = substream(seed, DOM_PERM, b).permutation(n)
        values[b] = engine.statistic(group[perm], strict=False)
    return build_report(observed, values, B=B, alpha=alpha, seed=seed, method="LOGRANK", n=n, started=started)


def cph_test(d: CensoredDataset, alpha: float = DEFAULT_ALPHA, seed: int = 0) -> TestReport:
    """Wald significance test of the proportional-hazards coefficient."""
    started = time.perf_counter()
    fit = cox_fit_score(d)
    p = float(chi2.sf(fit.wald_stat, 1))
    return TestReport(
        method="CPH",
        n=d.n,
        B=0,
        statistic=fit.wald_stat,
        rank=None,
        p_value=p,
        alpha=float(alpha),
        rejected=bool(p <= alpha),
        seed=int(seed),
        runtime_ms=(time.perf_counter() - started) * 1000.0,
    )


def run_method(
    method: str,
    data,
    *,
    B: int = DEFAULT_B,
    alpha: float = DEFAULT_ALPHA,
    seed: int = 0,
) -> TestReport:
    """Dispatch a method tag, converting between the two dataset shapes."""
    from .data import merge_two_sample, split_binary

    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if method in TWO_SAMPLE_METHODS:
        ts = data if isinstance(data, TwoSampleDataset) else split_binary(data)
        if method == "WHSIC-2S":
            return whsic_two_sample_test(ts, B, alpha, seed)
        if method == "IPX-HSIC":
            return ipx_hsic_test(ts, B, alpha, seed)
        return logrank_test(ts, B, alpha, seed)
    d = data if isinstance(data, CensoredDataset) else merge_two_sample(data)
    if method == "OPT-HSIC":
        return opt_hsic_test(d, B, alpha, seed)
    if method == "WHSIC":
        return whsic_test(d, B, alpha, seed)
    if method == "ZHSIC":
        return zhsic_test(d, B, alpha, seed)
    return cph_test(d, alpha, seed)
