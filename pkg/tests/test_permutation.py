"""Tests for the permutation engine: ranks, reports, exactness, determinism."""

import numpy as np
import pytest
from scipy.stats import kstest

from survot import (
    CensoredDataset,
    hsic_biased,
    permutation_test,
    rank_with_random_ties,
    substream,
)
from survot.procedures import permute_covariates


def test_rank_of_strict_maximum():
    assert rank_with_random_ties([5, 1, 2, 3], 0, substream(0, 1)) == 4


def test_rank_matches_ordinary_rank_when_distinct():
    rng = np.random.default_rng(0)
    for _ in range(50):
        values = rng.permutation(10).astype(float)
        idx = int(rng.integers(0, 10))
        expected = int(np.sum(values < values[idx])) + 1
        assert rank_with_random_ties(values, idx, substream(0, 2)) == expected


def test_two_way_tie_splits_evenly():
    hits = 0
    for seed in range(10_000):
        if rank_with_random_ties([2.0, 2.0], 0, substream(seed, 3)) == 1:
            hits += 1
    assert abs(hits - 5000) <= 3 * np.sqrt(10_000 * 0.25)


def test_rank_input_validation():
    with pytest.raises(ValueError):
        rank_with_random_ties([], 0, substream(0, 1))
    with pytest.raises(ValueError):
        rank_with_random_ties([1.0], 2, substream(0, 1))


def _small_dataset(seed=0):
    rng = np.random.default_rng(seed)
    return CensoredDataset(rng.normal(size=12), rng.exponential(size=12), rng.integers(0, 2, 12))


def test_report_threshold_arithmetic():
    # statistic strictly above every permuted value: R = B+1 = 20, reject
    d = _small_dataset()
    calls = {"count": -1}

    def stat(_):
        calls["count"] += 1
        return 100.0 if calls["count"] == 0 else float(calls["count"])

    report = permutation_test(d, stat, permute_covariates, B=19, alpha=0.05, seed=0)
    assert report.rank == 20
    assert report.rejected
    assert report.p_value == pytest.approx(1 / 20)


def test_p_value_bounds_and_threshold_rule():
    d = _small_dataset()
    rng = np.random.default_rng(1)
    for trial in range(20):
        B = int(rng.integers(1, 40))
        alpha = float(rng.uniform(0.01, 0.5))
        report = permutation_test(
            d,
            lambda data: hsic_biased(data.x, data.z),
            permute_covariates,
            B=B,
            alpha=alpha,
            seed=trial,
        )
        assert 1 <= report.rank <= B + 1
        assert 0.0 < report.p_value <= 1.0
        assert report.p_value == pytest.approx((B + 2 - report.rank) / (B + 1))
        assert report.rejected == (report.rank >= (1 - alpha) * (B + 1) + 1 - 1e-9)


def test_identical_seeds_give_identical_reports():
    d = _small_dataset()
    run = lambda: permutation_test(
        d, lambda data: hsic_biased(data.x, data.z), permute_covariates, B=50, alpha=0.05, seed=7
    )
    a, b = run(), run()
    assert a.to_json(include_runtime=False) == b.to_json(include_runtime=False)


def test_different_seeds_vary():
    d = _small_dataset()
    reports = {
        permutation_test(
            d, lambda data: hsic_biased(data.x, data.z), permute_covariates, B=50, alpha=0.05, seed=s
        ).rank
        for s in range(10)
    }
    assert len(reports) > 1


def test_constant_statistic_has_exact_size():
    # rejection probability is exactly floor(alpha (B+1)) / (B+1) = 1/20
    d = _small_dataset()
    B, alpha = 19, 0.05
    runs = 4000
    rejections = sum(
        permutation_test(d, lambda _: 1.0, lambda data, perm: data, B=B, alpha=alpha, seed=s).rejected
        for s in range(runs)
    )
    target = 1 / 20
    bound = 4 * np.sqrt(runs * target * (1 - target))
    assert abs(rejections - runs * target) <= bound


def test_null_p_values_are_uniform():
    pvals = []
    for rep in range(800):
        rng = np.random.default_rng(10_000 + rep)
        d = CensoredDataset(rng.normal(size=30), rng.exponential(size=30), np.ones(30))
        report = permutation_test(
            d,
            lambda data: hsic_biased(data.x, data.z),
            permute_covariates,
            B=99,
            alpha=0.05,
            seed=rep,
        )
        pvals.append(report.p_value)
    assert kstest(pvals, "uniform").pvalue > 0.01


def test_statistic_failure_reports_replicate():
    d = _small_dataset()
    calls = {"count": -1}

    def stat(_):
        calls["count"] += 1
        if calls["count"] == 3:
            raise ValueError("boom")
        return 0.0

    with pytest.raises(RuntimeError, match="replicate 2"):
        permutation_test(d, stat, permute_covariates, B=10, alpha=0.05, seed=0)


def test_parameter_validation():
    d = _small_dataset()
    with pytest.raises(ValueError):
        permutation_test(d, lambda _: 0.0, permute_covariates, B=0, alpha=0.05, seed=0)
    with pytest.raises(ValueError):
        permutation_test(d, lambda _: 0.0, permute_covariates, B=10, alpha=1.5, seed=0)


def test_report_json_shape():
    d = _small_dataset()
    report = permutation_test(
        d, lambda data: hsic_biased(data.x, data.z), permute_covariates, B=9, alpha=0.05, seed=0
    )
    record = report.to_dict()
    assert set(record) == {"method", "n", "B", "statistic", "rank", "p", "alpha", "rejected", "seed", "runtime_ms"}
    assert record["n"] == 12
    assert record["B"] == 9
