"""Tabular datasets, the outer train/test split, and seeded stratified folds."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ._rng import spawn_rng


class DataError(ValueError):
    """Raised for unloadable files or splits that cannot be constructed."""


@dataclass(frozen=True)
class Dataset:
    """Numeric feature matrix plus string class labels.

    ``class_set`` is ordered (first appearance at construction) and that order
    is the tie-breaking order used by every classifier downstream. Subsets
    inherit the parent's class_set so the ordering is stable across splits.
    """

    features: np.ndarray
    labels: np.ndarray
    class_set: tuple[str, ...]
    class_counts: dict[str, int] = field(compare=False)
    name: str = "dataset"

    def __post_init__(self):
        if self.features.ndim != 2 or self.features.shape[1] < 1:
            raise DataError("features must be a 2-D matrix with at least one column")
        if len(self.labels) != self.features.shape[0]:
            raise DataError("label count does not match feature row count")
        if len(self.class_set) < 2:
            raise DataError("dataset must contain at least 2 distinct classes")
        if sum(self.class_counts.values()) != len(self.labels):
            raise DataError("class_counts do not sum to the row count")

    @staticmethod
    def from_arrays(features, labels, name: str = "dataset") -> "Dataset":
        features = np.asarray(features, dtype=np.float64)
        labels = np.asarray([str(l) for l in labels], dtype=object)
        class_set: list[str] = []
        for l in labels:
            if l not in class_set:
                class_set.append(l)
        counts = {c: int(np.sum(labels == c)) for c in class_set}
        return Dataset(features, labels, tuple(class_set), counts, name)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, indices: np.ndarray, name: str | None = None) -> "Dataset":
        """Row subset that keeps the parent's class_set order."""
        indices = np.asarray(indices, dtype=np.intp)
        labels = self.labels[indices]
        counts = {c: int(np.sum(labels == c)) for c in self.class_set}
        return Dataset(self.features[indices], labels, self.class_set, counts, name or self.name)

    def label_indices(self) -> np.ndarray:
        """Labels encoded as positions in class_set."""
        lookup = {c: i for i, c in enumerate(self.class_set)}
        return np.asarray([lookup[l] for l in self.labels], dtype=np.intp)


@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset
    split_seed: int
    test_fraction: float


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    fold_assignment: np.ndarray  # per-instance fold index in [0, k)


def load_csv(path, label_column=None) -> Dataset:
    """Load an RFC-4180-ish CSV with a header row.

    label_column may be a header name or a 0-based index; default is the last
    column. All other cells must parse as real numbers; missing/non-numeric
    cells are rejected with their row and column named.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from e
    if not rows:
        raise DataError(f"{path}: file is empty")
    header = rows[0]
    if label_column is None:
        label_idx = len(header) - 1
    elif isinstance(label_column, int):
        label_idx = label_column
    else:
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not in header")
        label_idx = header.index(label_column)
    if not 0 <= label_idx < len(header):
        raise DataError(f"{path}: label column index {label_idx} out of range")
    if len(header) < 2:
        raise DataError(f"{path}: need at least one feature column besides the label")

    features, labels = [], []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"{path}: row {r} has {len(row)} cells, expected {len(header)}")
        feat_row = []
        for c, cell in enumerate(row):
            if c == label_idx:
                continue
            try:
                feat_row.append(float(cell))
            except ValueError:
                raise DataError(
                    f"{path}: row {r}, column {header[c]!r}: cannot parse {cell!r} as a number"
                ) from None
        features.append(feat_row)
        labels.append(row[label_idx])
    if not features:
        raise DataError(f"{path}: no data rows")
    if len(set(labels)) < 2:
        raise DataError(f"{path}: only one class present; need at least 2")
    import os

    return Dataset.from_arrays(features, labels, name=os.path.splitext(os.path.basename(str(path)))[0])


def _class_groups_canonical(d: Dataset) -> list[np.ndarray]:
    """Per-class index groups in a row-order-independent canonical order.

    Rows within a class are ordered lexicographically by feature values, so
    two datasets that differ only by a row permutation produce the same
    groups (as row content) before any seeded shuffling happens.
    """
    groups = []
    for c in d.class_set:
        idx = np.flatnonzero(d.labels == c)
        if len(idx):
            order = np.lexsort(d.features[idx].T[::-1])
            idx = idx[order]
        groups.append(idx)
    return groups


def train_test_split(d: Dataset, test_fraction: float, seed: int) -> SplitPair:
    """Stratified outer split. Every class with >= 2 rows lands in both halves."""
    if not 0.0 < test_fraction < 1.0:
        raise DataError("test_fraction must be strictly between 0 and 1")
    test_parts = []
    rng = spawn_rng(seed, 0x5B17)
    groups = _class_groups_canonical(d)
    for c, idx in zip(d.class_set, groups):
        if len(idx) < 2:
            raise DataError(f"class {c!r} has a single instance; cannot stratify")
        idx = idx[rng.permutation(len(idx))]
        n_test = int(np.floor(test_fraction * len(idx) + 0.5))
        n_test = min(max(n_test, 1), len(idx) - 1)
        test_parts.append(idx[:n_test])
    test_idx = np.sort(np.concatenate(test_parts))
    mask = np.ones(d.n_rows, dtype=bool)
    mask[test_idx] = False
    train_idx = np.flatnonzero(mask)
    return SplitPair(d.subset(train_idx), d.subset(test_idx), seed, test_fraction)


def stratified_kfold(d: Dataset, k: int, seed: int) -> FoldPlan:
    """Seeded stratified fold assignment.

    Class groups are shuffled independently and dealt round-robin into folds,
    carrying the dealing offset across classes so global fold sizes also
    differ by at most one.
    """
    if k < 2:
        raise DataError("k must be at least 2")
    if d.n_rows < k:
        raise DataError(f"dataset has {d.n_rows} rows, fewer than k={k}")
    rng = spawn_rng(seed, 0xF01D)
    assignment = np.empty(d.n_rows, dtype=np.intp)
    offset = 0
    for idx in _class_groups_canonical(d):
        if len(idx) == 0:
            continue
        idx = idx[rng.permutation(len(idx))]
        for j, row in enumerate(idx):
            assignment[row] = (offset + j) % k
        offset = (offset + len(idx)) % k
    return FoldPlan(k, seed, assignment)


def fold_views(d: Dataset, plan: FoldPlan, i: int) -> tuple[Dataset, Dataset]:
    """(internal_train, internal_test) for fold i of the plan."""
    if not 0 <= i < plan.k:
        raise DataError(f"fold index {i} out of range for k={plan.k}")
    test_idx = np.flatnonzero(plan.fold_assignment == i)
    train_idx = np.flatnonzero(plan.fold_assignment != i)
    if len(test_idx) == 0 or len(train_idx) == 0:
        raise DataError(f"fold {i} produces an empty view")
    return d.subset(train_idx), d.subset(test_idx)
