"""Tests for the monotone coupling, conditional sampling and the transformation."""

from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from scipy.stats import chisquare, spearmanr

from survot import (
    CensoredDataset,
    DataError,
    monotone_coupling,
    opt_transform,
    sample_conditional,
    substream,
)
from survot.transport import Coupling


def overlap_law(a: int, l: int, slot: int) -> list[tuple[int, Fraction]]:
    """Exact conditional over target slots for a source slot, by quantile overlap."""
    lo, hi = Fraction(slot, a), Fraction(slot + 1, a)
    out = []
    for v in range(l):
        o = min(hi, Fraction(v + 1, l)) - max(lo, Fraction(v, l))
        if o > 0:
            out.append((v, o * a))
    return out


def test_identical_multisets_give_diagonal():
    c = monotone_coupling([1, 2, 3], [3, 2, 1])
    assert np.allclose(c.mass, np.eye(3) / 3, atol=1e-15)
    rng = substream(0, 1)
    for x in (1.0, 2.0, 3.0):
        assert sample_conditional(c, x, rng) == x


def test_two_point_coupling_example():
    c = monotone_coupling([0, 1], [0, 2])
    assert np.allclose(c.mass, np.eye(2) / 2, atol=1e-15)
    # exhaustive minimum over 2x2 doubly-uniform couplings [[p, .5-p], [.5-p, p]]
    best = min((0.0 * p + 2 * (0.5 - p) + 1 * (0.5 - p) + 1 * p) for p in np.linspace(0, 0.5, 501))
    assert c.cost() == pytest.approx(best, abs=1e-12)
    rng = substream(0, 2)
    assert sample_conditional(c, 1.0, rng) == 2.0


def test_duplicate_source_example():
    c = monotone_coupling([0, 0, 3], [0, 1, 2])
    expected = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) / 3.0
    assert np.allclose(c.mass, expected, atol=1e-15)
    # vertex (permutation) enumeration of the equal-size problem
    s, t = [0, 0, 3], [0, 1, 2]
    best = min(sum(abs(s[i] - t[p[i]]) for i in range(3)) / 3 for p in permutations(range(3)))
    assert c.cost() == pytest.approx(best, abs=1e-12)


def test_equal_size_cost_is_minimal_over_permutations():
    rng = np.random.default_rng(0)
    for _ in range(100):
        m = int(rng.integers(1, 5))
        s = rng.integers(-4, 5, m).astype(float)
        t = rng.integers(-4, 5, m).astype(float)
        c = monotone_coupling(s, t)
        best = min(
            sum(abs(a - b) for a, b in zip(sorted(s), (sorted(t)[i] for i in p))) / m
            for p in permutations(range(m))
        )
        assert c.cost() == pytest.approx(best, abs=1e-12)
        sorted_cost = np.abs(np.sort(s) - np.sort(t)).sum() / m
        assert c.cost() == pytest.approx(sorted_cost, abs=1e-12)


def test_marginals_are_uniform():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a = int(rng.integers(1, 8))
        l = int(rng.integers(a, 9))
        c = monotone_coupling(rng.normal(size=a), rng.normal(size=l))
        assert np.allclose(c.mass.sum(axis=1), 1.0 / a, atol=1e-12)
        assert np.allclose(c.mass.sum(axis=0), 1.0 / l, atol=1e-12)
        assert c.mass.sum() == pytest.approx(1.0, abs=1e-12)


def test_unequal_sizes_match_overlap_law():
    rng = np.random.default_rng(2)
    for _ in range(30):
        a = int(rng.integers(1, 6))
        l = int(rng.integers(a, 8))
        c = monotone_coupling(rng.normal(size=a), rng.normal(size=l))
        for slot in range(a):
            expected = np.zeros(l)
            for v, p in overlap_law(a, l, slot):
                expected[v] = float(p) / a
            assert np.allclose(c.mass[slot], expected, atol=1e-12)


def test_coupling_rejects_empty():
    with pytest.raises(DataError):
        monotone_coupling([], [1.0])


def test_sample_conditional_requires_membership():
    c = monotone_coupling([0, 1], [0, 2])
    with pytest.raises(DataError, match="not in coupling source"):
        sample_conditional(c, 0.5, substream(0, 3))


def test_uniform_product_coupling_conditional_is_uniform():
    m = 4
    target = np.array([1.0, 2.0, 3.0, 4.0])
    c = Coupling(np.array([0.0, 1.0, 2.0, 3.0]), target, np.full((m, m), 1 / m**2))
    rng = substream(0, 4)
    draws = np.array([sample_conditional(c, 1.0, rng) for _ in range(10_000)])
    counts = np.array([(draws == t).sum() for t in target])
    p = 1 / m
    bound = 3 * np.sqrt(10_000 * p * (1 - p))
    assert np.all(np.abs(counts - 10_000 * p) <= bound)


def test_fully_observed_is_a_fixed_point():
    rng = np.random.default_rng(3)
    for trial in range(100):
        n = int(rng.integers(2, 15))
        x = rng.permutation(n).astype(float)  # distinct covariates
        z = np.sort(rng.random(n))
        d = CensoredDataset(x, z, np.ones(n))
        syn, trace = opt_transform(d, substream(trial, 1))
        assert sorted(zip(syn.y, syn.t)) == sorted(zip(d.x, d.z))
        assert trace.n_events == n


def test_all_censored_assigns_last_time():
    rng = np.random.default_rng(4)
    x = rng.normal(size=6)
    z = np.sort(rng.random(6))
    d = CensoredDataset(x, z, np.zeros(6))
    syn, trace = opt_transform(d, substream(0, 1))
    assert np.all(syn.t == d.z[-1])
    assert trace.n_events == 0
    assert sorted(syn.y) == sorted(d.x)


def test_covariate_and_time_conservation():
    rng = np.random.default_rng(5)
    for trial in range(50):
        n = int(rng.integers(3, 25))
        d = CensoredDataset(
            rng.integers(-3, 4, n).astype(float),
            np.sort(rng.random(n)),
            rng.integers(0, 2, n),
        )
        syn, trace = opt_transform(d, substream(trial, 2))
        assert sorted(syn.y) == sorted(d.x)
        # synthetic times: event times in order, leftovers at the last time
        event_times = d.z[d.delta == 1]
        assert np.array_equal(trace.event_time, event_times)
        assert np.array_equal(syn.t[: len(event_times)], event_times)
        assert np.all(syn.t[len(event_times):] == d.z[-1])


def test_trace_sizes_follow_deletion_schedule():
    rng = np.random.default_rng(6)
    for trial in range(30):
        n = int(rng.integers(3, 20))
        d = CensoredDataset(rng.normal(size=n), np.sort(rng.random(n)), rng.integers(0, 2, n))
        _, trace = opt_transform(d, substream(trial, 3))
        events_before = 0
        j = 0
        for i in range(n):
            if d.delta[i] == 1:
                assert trace.risk_size[j] == n - i
                assert trace.pool_size[j] == n - events_before
                events_before += 1
                j += 1
        assert j == trace.n_events


def exact_transform_law(d: CensoredDataset) -> dict:
    """Exact outcome distribution of the transformation by tree expansion."""
    n = d.n
    order = np.lexsort((np.arange(n), d.x))
    init_ar = [(float(d.x[r]), int(r)) for r in order]
    init_pool = tuple(sorted(float(v) for v in d.x))
    z_last = float(d.z[-1])
    law: dict = {}

    def recurse(i, ar, pool, assigned, prob):
        if i == n:
            y_all = [y for _, y in assigned] + list(pool)
            t_all = [t for t, _ in assigned] + [z_last] * len(pool)
            key = tuple(sorted(zip(y_all, t_all)))
            law[key] = law.get(key, Fraction(0)) + prob
            return
        slot = next(k for k, (_, row) in enumerate(ar) if row == i)
        if d.delta[i] == 1:
            for v, p in overlap_law(len(ar), len(pool), slot):
                recurse(
                    i + 1,
                    ar[:slot] + ar[slot + 1:],
                    pool[:v] + pool[v + 1:],
                    assigned + [(float(d.z[i]), pool[v])],
                    prob * p,
                )
        else:
            recurse(i + 1, ar[:slot] + ar[slot + 1:], pool, assigned, prob)

    recurse(0, init_ar, init_pool, [], Fraction(1))
    assert sum(law.values()) == 1
    return law


def test_sampled_outcomes_match_exact_law():
    d = CensoredDataset([1, 2, 3, 4], [1, 2, 3, 4], [0, 1, 1, 1])
    law = exact_transform_law(d)
    n_runs = 20_000
    counts = {key: 0 for key in law}
    for seed in range(n_runs):
        syn, _ = opt_transform(d, substream(seed, 1))
        key = tuple(sorted(zip(syn.y, syn.t)))
        assert key in law, f"sampled outcome outside the exact support: {key}"
        counts[key] += 1
    keys = sorted(law)
    expected = np.array([float(law[k]) * n_runs for k in keys])
    assert expected.min() >= 5.0
    observed = np.array([counts[k] for k in keys])
    result = chisquare(observed, f_exp=expected)
    assert result.pvalue > 0.01


def test_transform_preserves_rank_dependence_of_parabola():
    # parabolic lifetimes, moderate independent censoring: the synthetic
    # dataset should show about the same rank correlation as the truth
    rng = np.random.default_rng(7)
    n = 200
    syn_corr = []
    true_corr = []
    for trial in range(100):
        x = rng.uniform(-5, 5, n)
        t = x**2 / 2.0 + rng.exponential(10.0, n)
        c = rng.exponential(17.0, n)
        true_corr.append(spearmanr(x, t).statistic)
        d = CensoredDataset(x, np.minimum(t, c), (t <= c).astype(int))
        syn, _ = opt_transform(d, substream(trial, 4))
        syn_corr.append(spearmanr(syn.y, syn.t).statistic)
    assert abs(np.mean(syn_corr) - np.mean(true_corr)) <= 0.1


def test_transform_consumes_one_draw_per_event():
    d = CensoredDataset([1, 2, 3, 4], [1, 2, 3, 4], [0, 1, 0, 1])

    class CountingRng:
        def __init__(self, rng):
            self.rng = rng
            self.calls = 0

        def random(self):
            self.calls += 1
            return self.rng.random()

    counter = CountingRng(substream(0, 1))
    opt_transform(d, counter)
    assert counter.calls == 2
