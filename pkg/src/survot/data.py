"""Core data containers and CSV ingestion for right-censored samples.

A censored sample is a set of triples (x, z, delta): a real covariate, a
nonnegative observed time and an event indicator (1 = the event was
observed, 0 = the observation was censored).  All containers are immutable
and keep their rows in a canonical order so that every downstream
computation is deterministic, ties included.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


class DataError(ValueError):
    """Invalid dataset contents (bad indicator, negative time, too few rows...)."""


class CsvFormatError(DataError):
    """Malformed CSV input; the message carries the offending row number."""


CSV_HEADER = ("x", "z", "delta")


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def canonical_order(z: np.ndarray, delta: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Index array sorting rows by ascending z, ties broken by
    (delta descending, x ascending, original position ascending)."""
    idx = np.arange(len(z))
    return np.lexsort((idx, x, -delta, z))


@dataclass(frozen=True, eq=False)
class CensoredDataset:
    """n rows of (covariate, observed time, event indicator), canonically sorted."""

    x: np.ndarray
    z: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        z = np.asarray(self.z, dtype=np.float64)
        delta_f = np.asarray(self.delta, dtype=np.float64)
        if not (x.ndim == z.ndim == delta_f.ndim == 1):
            raise DataError("x, z and delta must be one-dimensional")
        n = len(x)
        if not (len(z) == len(delta_f) == n):
            raise DataError("x, z and delta must have equal length")
        if n < 2:
            raise DataError(f"need at least 2 rows, got {n}")
        if not (np.isfinite(x).all() and np.isfinite(z).all()):
            raise DataError("non-finite covariate or time")
        if (z < 0).any():
            raise DataError("negative observed time")
        if not np.isin(delta_f, (0.0, 1.0)).all():
            raise DataError("event indicator outside {0, 1}")
        delta = delta_f.astype(np.int64)
        order = canonical_order(z, delta, x)
        object.__setattr__(self, "x", _readonly(x[order]))
        object.__setattr__(self, "z", _readonly(z[order]))
        object.__setattr__(self, "delta", _readonly(delta[order]))

    @property
    def n(self) -> int:
        return len(self.z)

    @property
    def n_events(self) -> int:
        return int(self.delta.sum())

    @classmethod
    def from_rows(cls, rows) -> "CensoredDataset":
        rows = list(rows)
        x = np.array([r[0] for r in rows], dtype=np.float64)
        z = np.array([r[1] for r in rows], dtype=np.float64)
        d = np.array([r[2] for r in rows], dtype=np.float64)
        return cls(x, z, d)

    def rows(self) -> list[tuple[float, float, int]]:
        return [(float(a), float(b), int(c)) for a, b, c in zip(self.x, self.z, self.delta)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CensoredDataset):
            return NotImplemented
        return (
            np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
            and np.array_equal(self.delta, other.delta)
        )

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for xi, zi, di in zip(self.x, self.z, self.delta):
                writer.writerow([repr(float(xi)), repr(float(zi)), int(di)])


@dataclass(frozen=True, eq=False)
class SyntheticDataset:
    """Fully observed (covariate, event time) pairs produced by the transport
    transformation; covariates are a permutation-with-reassignment of the
    source covariates, every row counts as an observed event."""

    y: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64)
        t = np.asarray(self.t, dtype=np.float64)
        if y.ndim != 1 or t.ndim != 1 or len(y) != len(t):
            raise DataError("y and t must be one-dimensional and equally long")
        object.__setattr__(self, "y", _readonly(y))
        object.__setattr__(self, "t", _readonly(t))

    @property
    def n(self) -> int:
        return len(self.y)

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("y", "t"))
            for yi, ti in zip(self.y, self.t):
                writer.writerow([repr(float(yi)), repr(float(ti))])


@dataclass(frozen=True, eq=False)
class TwoSampleDataset:
    """(z, delta) pairs split into two groups; each group sorted like a
    canonical censored dataset (ascending z, events before censorings)."""

    z0: np.ndarray
    delta0: np.ndarray
    z1: np.ndarray
    delta1: np.ndarray

    def __post_init__(self):
        for name in ("z0", "z1"):
            zg = np.asarray(getattr(self, name), dtype=np.float64)
            dg = np.asarray(getattr(self, "delta" + name[-1]), dtype=np.int64)
            if len(zg) < 1:
                raise DataError(f"group {name[-1]} is empty")
            order = np.lexsort((np.arange(len(zg)), -dg, zg))
            object.__setattr__(self, name, _readonly(zg[order]))
            object.__setattr__(self, "delta" + name[-1], _readonly(dg[order]))

    @property
    def n0(self) -> int:
        return len(self.z0)

    @property
    def n1(self) -> int:
        return len(self.z1)

    @property
    def n(self) -> int:
        return self.n0 + self.n1


class RiskSet:
    """Multiset of covariate values; removal deletes exactly one instance."""

    def __init__(self, values):
        vals = np.sort(np.asarray(values, dtype=np.float64))
        if vals.ndim != 1:
            raise DataError("risk set values must be one-dimensional")
        self._values = _readonly(vals)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def count(self) -> int:
        return len(self._values)

    def remove(self, value: float) -> "RiskSet":
        pos = int(np.searchsorted(self._values, value, side="left"))
        if pos >= len(self._values) or self._values[pos] != value:
            raise DataError(f"value {value!r} not in risk set")
        return RiskSet(np.delete(self._values, pos))

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        return f"RiskSet({list(self._values)!r})"


def load_csv(path) -> CensoredDataset:
    """Read a (x, z, delta) CSV into a canonical dataset.

    An optional header line "x,z,delta" is accepted.  Every data row must
    have exactly three fields; errors report the 1-based row number.
    """
    xs, zs, ds = [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for rowno, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            fields = [f.strip() for f in row]
            if rowno == 1 and tuple(f.lower() for f in fields) == CSV_HEADER:
                continue
            if len(fields) != 3:
                raise CsvFormatError(f"row {rowno}: expected 3 fields, got {len(fields)}")
            try:
                xv, zv, dv = (float(f) for f in fields)
            except ValueError:
                raise CsvFormatError(f"row {rowno}: could not parse {row!r}") from None
            if dv not in (0.0, 1.0):
                raise CsvFormatError(f"row {rowno}: indicator outside {{0, 1}}")
            if zv < 0:
                raise CsvFormatError(f"row {rowno}: negative observed time")
            xs.append(xv)
            zs.append(zv)
            ds.append(dv)
    if len(xs) < 2:
        raise DataError(f"need at least 2 rows, got {len(xs)}")
    return CensoredDataset(np.array(xs), np.array(zs), np.array(ds))


def split_binary(d: CensoredDataset) -> TwoSampleDataset:
    """Partition a dataset with covariates in {0, 1} into its two groups."""
    is0 = d.x == 0.0
    is1 = d.x == 1.0
    if not (is0 | is1).all():
        bad = d.x[~(is0 | is1)][0]
        raise DataError(f"non-binary covariate {bad!r}")
    if not is0.any() or not is1.any():
        raise DataError("both groups must be nonempty")
    return TwoSampleDataset(d.z[is0], d.delta[is0], d.z[is1], d.delta[is1])


def merge_two_sample(ts: TwoSampleDataset) -> CensoredDataset:
    """Inverse of split_binary: rebuild the binary-covariate dataset."""
    x = np.concatenate([np.zeros(ts.n0), np.ones(ts.n1)])
    z = np.concatenate([ts.z0, ts.z1])
    delta = np.concatenate([ts.delta0, ts.delta1])
    return CensoredDataset(x, z, delta)
