"""Dataset representation, bounds validation, vertical partitioning,
min-max normalization and train/test splitting.

Conventions: rows are aligned subjects, the label is the last column,
and all entries must be finite.  Party blocks are contiguous column
ranges; block j of a partition is owned by party j (1-based).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .streams import RandomStream

__all__ = [
    "DataMatrix",
    "BoundsReport",
    "PartyPartition",
    "SplitDataset",
    "DataFormatError",
    "validate_bounds",
    "partition_evenly",
    "slice_party",
    "normalize_minmax",
    "split_train_test",
    "load_csv",
    "save_csv",
]


class DataFormatError(ValueError):
    """A fatal ingestion problem, with 1-based row/column context."""

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        self.row = row
        self.column = column
        where = ""
        if row is not None:
            where += f" (row {row}"
            where += f", column {column})" if column is not None else ")"
        super().__init__(message + where)


@dataclass(frozen=True)
class DataMatrix:
    """A dense n-by-(d+1) real matrix with named columns, label last."""

    values: np.ndarray
    column_names: tuple[str, ...]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("values must be a 2-dimensional matrix")
        if values.shape[1] != len(self.column_names):
            raise ValueError(
                f"{values.shape[1]} columns but {len(self.column_names)} column names"
            )
        if values.shape[1] < 1 or values.shape[0] < 1:
            raise ValueError("matrix must have at least one row and one column")
        if not np.isfinite(values).all():
            bad = np.argwhere(~np.isfinite(values))[0]
            raise ValueError(f"non-finite entry at row {bad[0]}, column {bad[1]}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        """Feature count (total columns minus the label)."""
        return self.values.shape[1] - 1

    def features(self) -> np.ndarray:
        return self.values[:, :-1]

    def labels(self) -> np.ndarray:
        return self.values[:, -1]


@dataclass(frozen=True)
class BoundsReport:
    """Outcome of the |entry| <= 1 check; lists offenders when it fails."""

    ok: bool
    violations: tuple[tuple[int, int], ...]


def validate_bounds(data: DataMatrix) -> BoundsReport:
    """Check that every |entry| <= 1 (bound inclusive).

    Returns a report rather than raising, so callers can normalize and
    retry.
    """
    mask = np.abs(data.values) > 1.0
    if not mask.any():
        return BoundsReport(ok=True, violations=())
    pairs = tuple((int(r), int(c)) for r, c in np.argwhere(mask))
    return BoundsReport(ok=False, violations=pairs)


@dataclass(frozen=True)
class PartyPartition:
    """Assignment of contiguous column ranges to m >= 2 parties.

    ``blocks`` holds half-open [start, stop) column ranges that are
    ordered, disjoint and cover all d+1 columns.
    """

    blocks: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        blocks = tuple((int(a), int(b)) for a, b in self.blocks)
        if len(blocks) < 2:
            raise ValueError("a partition needs at least 2 parties")
        if blocks[0][0] != 0:
            raise ValueError("blocks must start at column 0")
        for (a, b), (c, _) in zip(blocks, blocks[1:]):
            if b != c:
                raise ValueError("blocks must be contiguous and ordered")
        if any(b <= a for a, b in blocks):
            raise ValueError("every party must own at least one column")
        object.__setattr__(self, "blocks", blocks)

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def d_js(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in self.blocks)

    @property
    def d_max(self) -> int:
        return max(self.d_js)

    @property
    def total_columns(self) -> int:
        return self.blocks[-1][1]


def partition_evenly(d_plus_1: int, m: int) -> PartyPartition:
    """Split d+1 columns into m contiguous blocks with widths differing
    by at most one; earlier blocks take the remainder."""
    if m < 2:
        raise ValueError(f"need at least 2 parties, got {m}")
    if d_plus_1 < m:
        raise ValueError(f"cannot split {d_plus_1} columns among {m} parties")
    base, rem = divmod(d_plus_1, m)
    blocks = []
    start = 0
    for j in range(m):
        width = base + (1 if j < rem else 0)
        blocks.append((start, start + width))
        start += width
    return PartyPartition(blocks=tuple(blocks))


def slice_party(data: DataMatrix, partition: PartyPartition, j: int) -> np.ndarray:
    """The n-by-d_j column block owned by party j (1-based)."""
    if partition.total_columns != data.values.shape[1]:
        raise ValueError("partition does not cover this matrix")
    if not 1 <= j <= partition.m:
        raise IndexError(f"party index {j} out of range 1..{partition.m}")
    a, b = partition.blocks[j - 1]
    return data.values[:, a:b]


@dataclass(frozen=True)
class SplitDataset:
    """A normalized train/test pair plus the per-column (min, max) stats
    that defined the normalization (computed on the training portion)."""

    train: DataMatrix
    test: DataMatrix
    normalization_stats: tuple[tuple[float, float], ...]


def normalize_minmax(train: DataMatrix, test: DataMatrix) -> SplitDataset:
    """Affine-map each column to [0, 1] using train-only min/max.

    Constant training columns map to 0.5 everywhere.  Test values are
    clamped into [0, 1] since they may exceed the training range.
    """
    if train.column_names != test.column_names:
        raise ValueError("train and test must share column names")
    lo = train.values.min(axis=0)
    hi = train.values.max(axis=0)
    span = hi - lo
    constant = span == 0.0

    def apply(values: np.ndarray, clamp: bool) -> np.ndarray:
        out = np.empty_like(values)
        np.subtract(values, lo, out=out)
        np.divide(out, np.where(constant, 1.0, span), out=out)
        out[:, constant] = 0.5
        if clamp:
            np.clip(out, 0.0, 1.0, out=out)
        return out

    stats = tuple((float(a), float(b)) for a, b in zip(lo, hi))
    return SplitDataset(
        train=DataMatrix(apply(train.values, clamp=False), train.column_names),
        test=DataMatrix(apply(test.values, clamp=True), test.column_names),
        normalization_stats=stats,
    )


def split_train_test(
    data: DataMatrix, rng: RandomStream | np.random.Generator
) -> tuple[DataMatrix, DataMatrix]:
    """Uniformly random 4:1 row split with |train| = round(0.8 * n)."""
    if data.n < 5:
        raise ValueError(f"need at least 5 rows to split 4:1, got {data.n}")
    if isinstance(rng, RandomStream):
        rng = rng.generator()
    n_train = round(0.8 * data.n)
    perm = rng.permutation(data.n)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    return (
        DataMatrix(data.values[train_idx], data.column_names),
        DataMatrix(data.values[test_idx], data.column_names),
    )


def load_csv(path: str, label_column: str | None = None) -> DataMatrix:
    """Ingest a UTF-8, comma-separated file with a header row.

    Non-numeric cells and ragged rows are fatal, reported with 1-based
    row/column positions.  If ``label_column`` names a column other than
    the last one, columns are reordered so the label comes last.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: file is empty") from None
        names = [h.strip() for h in header]
        rows: list[list[float]] = []
        for lineno, raw in enumerate(reader, start=2):
            if len(raw) != len(names):
                raise DataFormatError(
                    f"{path}: expected {len(names)} cells, found {len(raw)}", row=lineno
                )
            parsed = []
            for col, cell in enumerate(raw, start=1):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise DataFormatError(
                        f"{path}: non-numeric cell {cell!r}", row=lineno, column=col
                    ) from None
            rows.append(parsed)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    values = np.asarray(rows, dtype=np.float64)
    if label_column is not None:
        if label_column not in names:
            raise DataFormatError(f"{path}: no column named {label_column!r}")
        idx = names.index(label_column)
        order = [i for i in range(len(names)) if i != idx] + [idx]
        values = values[:, order]
        names = [names[i] for i in order]
    return DataMatrix(values, tuple(names))


def save_csv(data: DataMatrix, path: str) -> None:
    """Write a DataMatrix in the same format ``load_csv`` ingests."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(data.column_names)
        for row in data.values:
            writer.writerow([format(v, ".17g") for v in row])
