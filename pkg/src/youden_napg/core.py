"""Shared domain types, CSV ingestion and dataset splitting."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


class ValidationError(ValueError):
    """A domain invariant was violated (shapes, class counts, ranges)."""


class IngestionError(ValueError):
    """A CSV cell could not be ingested; the message carries row/column."""


def _frozen_array(a, ndim):
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValidationError(f"expected {ndim}-d array, got shape {arr.shape}")
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class BiomarkerDataset:
    """Diseased (n1 x p) and healthy (n0 x p) biomarker matrices."""

    diseased: np.ndarray
    healthy: np.ndarray
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "diseased", _frozen_array(self.diseased, 2))
        object.__setattr__(self, "healthy", _frozen_array(self.healthy, 2))
        if self.diseased.shape[0] < 1 or self.healthy.shape[0] < 1:
            raise ValidationError("each class needs at least one row")
        if self.diseased.shape[1] != self.healthy.shape[1]:
            raise ValidationError(
                "diseased and healthy must share the same number of features: "
                f"{self.diseased.shape[1]} vs {self.healthy.shape[1]}"
            )
        if self.diseased.shape[1] < 1:
            raise ValidationError("need at least one feature")
        if not (np.isfinite(self.diseased).all() and np.isfinite(self.healthy).all()):
            raise ValidationError("all entries must be finite")
        if self.feature_names is not None:
            names = tuple(self.feature_names)
            if len(names) != self.diseased.shape[1]:
                raise ValidationError("feature_names length must equal p")
            object.__setattr__(self, "feature_names", names)

    @property
    def n1(self) -> int:
        return self.diseased.shape[0]

    @property
    def n0(self) -> int:
        return self.healthy.shape[0]

    @property
    def p(self) -> int:
        return self.diseased.shape[1]


@dataclass(frozen=True)
class RulePoint:
    """A linear decision rule: combination weights plus a cutoff.

    The rule classifies a sample t as positive when omega . t > cutoff.
    """

    omega: np.ndarray
    cutoff: float

    def __post_init__(self):
        object.__setattr__(self, "omega", _frozen_array(self.omega, 1))
        object.__setattr__(self, "cutoff", float(self.cutoff))

    @property
    def p(self) -> int:
        return self.omega.shape[0]

    def as_vector(self) -> np.ndarray:
        """Stacked [omega, cutoff] vector of length p + 1."""
        return np.concatenate([self.omega, [self.cutoff]])

    @classmethod
    def from_vector(cls, vec) -> "RulePoint":
        vec = np.asarray(vec, dtype=np.float64)
        return cls(omega=vec[:-1], cutoff=float(vec[-1]))

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return abs(float(np.linalg.norm(self.omega)) - 1.0) <= tol


@dataclass(frozen=True)
class HyperParams:
    """Sensitivity weight, smoothing bandwidth and penalty parameters."""

    pi: float
    bandwidth: float
    lambda1: float = 0.0
    lambda2: float = 0.0
    scad_a: float = 3.7

    def __post_init__(self):
        if not 0.0 < self.pi < 1.0:
            raise ValidationError(f"pi must be in (0,1), got {self.pi}")
        if self.bandwidth <= 0:
            raise ValidationError(f"bandwidth must be positive, got {self.bandwidth}")
        if self.scad_a <= 2:
            raise ValidationError(f"scad_a must exceed 2, got {self.scad_a}")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValidationError("penalty weights must be nonnegative")


@dataclass(frozen=True)
class EvalMetrics:
    """Weighted Youden index and companion classification metrics."""

    weighted_youden: float
    sensitivity: float
    specificity: float
    nonzero_count: int
    detection_rate: float | None = None
    shrinkage_accuracy: float | None = None

    def to_dict(self) -> dict:
        d = {
            "weighted_youden": self.weighted_youden,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "nonzero_count": self.nonzero_count,
        }
        if self.detection_rate is not None:
            d["detection_rate"] = self.detection_rate
        if self.shrinkage_accuracy is not None:
            d["shrinkage_accuracy"] = self.shrinkage_accuracy
        return d


def load_dataset(path, label_column: str, positive_label: str) -> BiomarkerDataset:
    """Load a two-class biomarker CSV.

    Rows whose label equals ``positive_label`` become the diseased class,
    all other rows the healthy class. The label column may sit anywhere;
    the remaining columns are parsed as decimal floats in header order.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        if label_column not in header:
            raise ValidationError(f"label column {label_column!r} not in header")
        label_idx = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_idx]

        diseased_rows, healthy_rows = [], []
        labels_seen = set()
        for rownum, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise IngestionError(
                    f"row {rownum}: expected {len(header)} cells, got {len(row)}"
                )
            label = row[label_idx]
            labels_seen.add(label)
            values = []
            for i, cell in enumerate(row):
                if i == label_idx:
                    continue
                try:
                    x = float(cell)
                except ValueError:
                    raise IngestionError(
                        f"row {rownum}, column {header[i]!r}: "
                        f"cannot parse {cell!r} as a number"
                    ) from None
                if not np.isfinite(x):
                    raise IngestionError(
                        f"row {rownum}, column {header[i]!r}: non-finite value {cell!r}"
                    )
                values.append(x)
            (diseased_rows if label == positive_label else healthy_rows).append(values)

    if len(labels_seen) != 2:
        raise ValidationError(
            f"label column must contain exactly two distinct values, "
            f"found {sorted(labels_seen)}"
        )
    if positive_label not in labels_seen:
        raise ValidationError(f"positive label {positive_label!r} not present")
    if not diseased_rows or not healthy_rows:
        raise ValidationError("each class needs at least one row")
    return BiomarkerDataset(
        diseased=np.array(diseased_rows),
        healthy=np.array(healthy_rows),
        feature_names=tuple(feature_names),
    )


def save_dataset(
    data: BiomarkerDataset,
    path,
    label_column: str = "label",
    positive_label: str = "1",
    negative_label: str = "0",
) -> None:
    """Write a dataset back to CSV; values round-trip bit-exactly via repr."""
    names = data.feature_names or tuple(f"m{i+1}" for i in range(data.p))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([label_column, *names])
        for row in data.diseased:
            writer.writerow([positive_label, *(repr(float(x)) for x in row)])
        for row in data.healthy:
            writer.writerow([negative_label, *(repr(float(x)) for x in row)])


def _split_class(matrix: np.ndarray, fraction: float, rng) -> tuple[np.ndarray, np.ndarray]:
    n = matrix.shape[0]
    if n < 2:
        raise ValidationError("each class needs at least 2 rows to split")
    k = int(round(n * fraction))
    k = min(max(k, 1), n - 1)
    perm = rng.permutation(n)
    return matrix[np.sort(perm[:k])], matrix[np.sort(perm[k:])]


def split_train_test(
    data: BiomarkerDataset, fraction: float, seed: int
) -> tuple[BiomarkerDataset, BiomarkerDataset]:
    """Stratified split: each class is partitioned independently at ``fraction``.

    Deterministic for a fixed seed; both parts of each class are non-empty.
    """
    if not 0.0 < fraction < 1.0:
        raise ValidationError(f"fraction must be in (0,1), got {fraction}")
    rng = np.random.default_rng(seed)
    dis_a, dis_b = _split_class(data.diseased, fraction, rng)
    hea_a, hea_b = _split_class(data.healthy, fraction, rng)
    first = BiomarkerDataset(dis_a, hea_a, data.feature_names)
    second = BiomarkerDataset(dis_b, hea_b, data.feature_names)
    return first, second
