"""Core series types: CSV ingestion, pseudo-normalization, lagged pairs.

The pseudo-normalization replaces each observation by the standard normal
quantile of its rescaled empirical CDF value, rank/(n+1).  Ranks are
averaged over ties.  The transform is rank-determined, hence invariant
under strictly increasing maps of the raw data.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri
from scipy.stats import rankdata


class DataError(ValueError):
    """Raised for unusable input data (parse failures, bad shapes)."""


@dataclass(frozen=True)
class Series:
    """Raw univariate observations, in time order."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.size < 2:
            raise DataError(f"series needs at least 2 observations, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise DataError(f"non-finite value at position {bad}")

    @property
    def n(self) -> int:
        return self.values.size

    def content_digest(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.values).tobytes()).hexdigest()


@dataclass(frozen=True)
class NormalizedSeries:
    """Pseudo-normalized observations with the digest of their source."""

    values: np.ndarray
    source_hash: str

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if not np.all(np.isfinite(vals)):
            raise DataError("non-finite pseudo-normalized value")

    @property
    def n(self) -> int:
        return self.values.size

    def to_csv(self, path) -> None:
        """Write columns t,z (t is 1-based time index)."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "z"])
            for t, z in enumerate(self.values, start=1):
                writer.writerow([t, format(z, ".17g")])


@dataclass(frozen=True)
class LocalPoint:
    """Evaluation point v = (v1, v2) in the pseudo-normalized plane."""

    v1: float
    v2: float

    def __post_init__(self):
        if not (np.isfinite(self.v1) and np.isfinite(self.v2)):
            raise DataError(f"non-finite point ({self.v1}, {self.v2})")

    @property
    def is_diagonal(self) -> bool:
        return self.v1 == self.v2

    def reflected(self) -> "LocalPoint":
        """Diagonal reflection (v2, v1)."""
        return LocalPoint(self.v2, self.v1)


@dataclass(frozen=True)
class Bandwidth:
    b1: float
    b2: float

    def __post_init__(self):
        if not (self.b1 > 0 and self.b2 > 0):
            raise DataError(f"bandwidth components must be positive, got ({self.b1}, {self.b2})")


@dataclass(frozen=True)
class LaggedPairs:
    """Lag-h pairs (z_{t+h}, z_t), t ascending; first component leads."""

    h: int
    lead: np.ndarray = field(repr=False)
    lagged: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.lead.shape != self.lagged.shape or self.lead.ndim != 1:
            raise DataError("pair components must be equal-length 1-d arrays")

    def __len__(self) -> int:
        return self.lead.size

    def swapped(self) -> "LaggedPairs":
        return LaggedPairs(self.h, self.lagged, self.lead)


def load_csv(path, column=0) -> Series:
    """Read one column of reals from a CSV file.

    Parameters
    ----------
    path : str or Path
        Comma-separated file, '.' decimal, optional header row.
    column : int or str
        Zero-based column index, or a header name.

    Returns
    -------
    Series in file order.  Any unparseable or missing cell aborts with an
    error naming the offending row and column.
    """
    with open(path, "r", newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise DataError(f"{path}: empty file")

    col_idx = column
    start = 0
    if isinstance(column, str):
        header = [c.strip() for c in rows[0]]
        if column not in header:
            raise DataError(f"{path}: column {column!r} not found in header {header}")
        col_idx = header.index(column)
        start = 1
    else:
        # numeric index: skip a header row iff the target cell is not a number
        try:
            float(rows[0][col_idx])
        except (ValueError, IndexError):
            start = 1

    values = []
    for i, row in enumerate(rows[start:], start=start + 1):
        if col_idx >= len(row) or not row[col_idx].strip():
            raise DataError(f"{path}: missing value at row {i}, column {column}")
        cell = row[col_idx].strip()
        try:
            values.append(float(cell))
        except ValueError:
            raise DataError(f"{path}: cannot parse {cell!r} at row {i}, column {column}") from None
    if len(values) < 2:
        raise DataError(f"{path}: need at least 2 observations, got {len(values)}")
    return Series(np.array(values))


def normalize(s: Series) -> NormalizedSeries:
    """Pseudo-normalize: z_t = ndtri(rank(y_t) / (n + 1)).

    Ranks come from an ascending sort with average ranks on ties, so the
    transform preserves rank order and is exactly invariant under strictly
    increasing maps of the input.
    """
    ranks = rankdata(s.values, method="average")
    z = ndtri(ranks / (s.n + 1))
    return NormalizedSeries(z, s.content_digest())


def lag_pairs(z: NormalizedSeries, h: int) -> LaggedPairs:
    """Build the n-h pairs (z_{t+h}, z_t) for lag h, 1 <= h <= n-1."""
    n = z.n
    if not 1 <= h <= n - 1:
        raise DataError(f"lag h={h} out of range [1, {n - 1}]")
    return LaggedPairs(h, z.values[h:], z.values[:-h])


def strip_and_square_counts(z: NormalizedSeries, v: LocalPoint, b: Bandwidth, h: int):
    """Effective-sample diagnostics at a diagonal point.

    Returns (strip_count, square_count): observations within the level
    strip |z_t - v1| <= b2, and lag-h pairs inside the bandwidth square
    |z_{t+h} - v1| <= b1 and |z_t - v2| <= b2.
    """
    if not v.is_diagonal:
        raise DataError("strips are defined for levels, i.e. diagonal points only")
    strip = int(np.count_nonzero(np.abs(z.values - v.v1) <= b.b2))
    pairs = lag_pairs(z, h)
    inside = (np.abs(pairs.lead - v.v1) <= b.b1) & (np.abs(pairs.lagged - v.v2) <= b.b2)
    return strip, int(np.count_nonzero(inside))
