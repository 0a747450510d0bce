"""Tests for the data containers, canonical ordering and CSV round-trips."""

import numpy as np
import pytest

from survot import (
    CensoredDataset,
    CsvFormatError,
    DataError,
    RiskSet,
    load_csv,
    merge_two_sample,
    split_binary,
)


def test_load_csv_sorts_by_time(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("1.0,2.0,1\n0.5,1.0,0\n")
    d = load_csv(path)
    assert d.rows() == [(0.5, 1.0, 0), (1.0, 2.0, 1)]
    assert d.n == 2


def test_tied_times_put_events_first(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("0,1,1\n0,1,0\n")
    d = load_csv(path)
    assert d.rows() == [(0.0, 1.0, 1), (0.0, 1.0, 0)]


def test_tie_break_is_fully_deterministic():
    d = CensoredDataset([3.0, 1.0, 2.0, 1.0], [5.0, 5.0, 5.0, 5.0], [0, 1, 1, 1])
    # same time: events first, then covariate ascending
    assert d.rows() == [(1.0, 5.0, 1), (1.0, 5.0, 1), (2.0, 5.0, 1), (3.0, 5.0, 0)]


def test_bad_indicator_reports_row(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("1.0,2.0,2\n0.5,1.0,0\n")
    with pytest.raises(CsvFormatError, match="row 1"):
        load_csv(path)


def test_malformed_row_reports_row(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("1.0,2.0,1\nnope,1.0,0\n")
    with pytest.raises(CsvFormatError, match="row 2"):
        load_csv(path)


def test_negative_time_rejected(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("1.0,-2.0,1\n0.5,1.0,0\n")
    with pytest.raises(CsvFormatError, match="row 1"):
        load_csv(path)
    with pytest.raises(DataError):
        CensoredDataset([1.0, 0.5], [-2.0, 1.0], [1, 0])


def test_too_few_rows_rejected(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("x,z,delta\n1.0,2.0,1\n")
    with pytest.raises(DataError, match="at least 2"):
        load_csv(path)


def test_header_is_optional(tmp_path):
    with_header = tmp_path / "a.csv"
    with_header.write_text("x,z,delta\n1.0,2.0,1\n0.5,1.0,0\n")
    without = tmp_path / "b.csv"
    without.write_text("1.0,2.0,1\n0.5,1.0,0\n")
    assert load_csv(with_header) == load_csv(without)


def test_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    d = CensoredDataset(rng.normal(size=50) * 1e3, rng.exponential(size=50), rng.integers(0, 2, 50))
    path = tmp_path / "d.csv"
    d.save_csv(path)
    d2 = load_csv(path)
    assert np.array_equal(d.x, d2.x)
    assert np.array_equal(d.z, d2.z)
    assert np.array_equal(d.delta, d2.delta)


def test_canonicalization_is_idempotent():
    rng = np.random.default_rng(1)
    z = rng.integers(0, 5, 30).astype(float)  # many ties
    d = CensoredDataset(rng.normal(size=30), z, rng.integers(0, 2, 30))
    again = CensoredDataset(d.x, d.z, d.delta)
    assert d == again


def test_split_binary_partitions_and_sorts():
    d = CensoredDataset([0, 1, 0], [1, 2, 3], [1, 0, 1])
    ts = split_binary(d)
    assert ts.z0.tolist() == [1.0, 3.0]
    assert ts.delta0.tolist() == [1, 1]
    assert ts.z1.tolist() == [2.0]
    assert ts.delta1.tolist() == [0]
    assert (ts.n0, ts.n1) == (2, 1)


def test_split_binary_rejects_single_group():
    d = CensoredDataset([0, 0, 0], [1, 2, 3], [1, 0, 1])
    with pytest.raises(DataError, match="nonempty"):
        split_binary(d)


def test_split_binary_rejects_non_binary():
    d = CensoredDataset([0, 0.5, 1], [1, 2, 3], [1, 0, 1])
    with pytest.raises(DataError, match="non-binary"):
        split_binary(d)


def test_split_then_merge_recovers_multiset():
    rng = np.random.default_rng(2)
    d = CensoredDataset(rng.integers(0, 2, 40).astype(float), rng.exponential(size=40), rng.integers(0, 2, 40))
    merged = merge_two_sample(split_binary(d))
    assert sorted(d.rows()) == sorted(merged.rows())


def test_risk_set_removes_one_instance():
    rs = RiskSet([2.0, 1.0, 2.0])
    assert rs.count == 3
    rs2 = rs.remove(2.0)
    assert rs2.values.tolist() == [1.0, 2.0]
    with pytest.raises(DataError):
        rs.remove(7.0)


def test_arrays_are_immutable():
    d = CensoredDataset([1.0, 0.5], [2.0, 1.0], [1, 0])
    with pytest.raises(ValueError):
        d.x[0] = 9.0
