"""Synthetic data generation, splitting, and CSV ingestion.

Generation draws features i.i.d. standard normal (times a scale) and
labels Bernoulli with logistic probabilities under true coefficients.
Everything is driven by the portable generator in :mod:`.rng`, with a
fixed draw order (all feature normals row-major, then all label
uniforms), so identical specs reproduce identical datasets anywhere.

The overfit-prone benchmark regime keeps the labeled split tiny
relative to the feature count (defaults: 10 features, 20 labeled, 200
unlabeled, 500 test), which is exactly the setting where an overfit
initial model can poison later pseudo-label selections.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import (
    CsvFormatError,
    DimensionMismatchError,
    MissingValueError,
    SizeOverflowError,
    UnknownColumnError,
)
from .glm import LabeledSet, UnlabeledPool
from .rng import Xoshiro256PlusPlus

_MAX_SEED = (1 << 64) - 1


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for one synthetic dataset."""

    seed: int
    n: int
    d_features: int
    theta_star: tuple[float, ...]
    feature_scale: float = 1.0

    def __post_init__(self):
        if not (0 <= int(self.seed) <= _MAX_SEED):
            raise DimensionMismatchError("seed must be an unsigned 64-bit integer")
        if self.n < 1 or self.d_features < 1:
            raise DimensionMismatchError("need n >= 1 and d_features >= 1")
        theta = tuple(float(t) for t in self.theta_star)
        if len(theta) != self.d_features + 1:
            raise DimensionMismatchError(
                f"theta_star must have length {self.d_features + 1} (intercept included)"
            )
        if any(not np.isfinite(t) for t in theta):
            raise DimensionMismatchError("theta_star entries must be finite")
        if not (np.isfinite(self.feature_scale) and self.feature_scale > 0):
            raise DimensionMismatchError("feature_scale must be positive and finite")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "theta_star", theta)
        object.__setattr__(self, "feature_scale", float(self.feature_scale))


def generate(spec: SyntheticSpec) -> tuple[np.ndarray, np.ndarray]:
    """Generate (features, labels); features carry the intercept column."""
    gen = Xoshiro256PlusPlus(spec.seed)
    z = np.array(gen.normals(spec.n * spec.d_features)).reshape(spec.n, spec.d_features)
    features = np.hstack([np.ones((spec.n, 1)), spec.feature_scale * z])
    logits = features @ np.asarray(spec.theta_star)
    probs = np.where(logits >= 0, 1.0 / (1.0 + np.exp(-logits)), np.exp(logits) / (1.0 + np.exp(logits)))
    labels = np.array([gen.bernoulli(p) for p in probs], dtype=int)
    return features, labels


@dataclass(frozen=True)
class SplitSpec:
    """Sizes and seed for the labeled / unlabeled / test partition.

    ``n_unlabeled`` may be zero (the selection loop then degenerates to
    plain supervised fitting); the other two splits must be nonempty.
    """

    n_labeled: int
    n_unlabeled: int
    n_test: int
    seed: int
    stratified: bool = False

    def __post_init__(self):
        if self.n_labeled < 1 or self.n_test < 1 or self.n_unlabeled < 0:
            raise SizeOverflowError(
                "need n_labeled >= 1, n_test >= 1, n_unlabeled >= 0"
            )
        if not (0 <= int(self.seed) <= _MAX_SEED):
            raise DimensionMismatchError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class SplitResult:
    """The three splits plus the pool's true labels.

    ``pool_labels`` exists for evaluation only; the selection engine
    consumes ``pool`` and never sees them.
    """

    labeled: LabeledSet
    pool: UnlabeledPool
    test: LabeledSet
    pool_labels: np.ndarray


def split(features: np.ndarray, labels: np.ndarray, spec: SplitSpec) -> SplitResult:
    """Seeded permutation, then contiguous labeled/unlabeled/test assignment.

    Stratified mode balances labels in the labeled split as evenly as
    the permuted population allows (label 1 gets ``n_labeled // 2``
    slots, label 0 the remainder; shortfalls are topped up in permuted
    order).
    """
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n = features.shape[0]
    total = spec.n_labeled + spec.n_unlabeled + spec.n_test
    if total > n:
        raise SizeOverflowError(f"splits need {total} rows but only {n} are available")
    if spec.n_labeled < features.shape[1]:
        warnings.warn(
            f"labeled split ({spec.n_labeled}) is smaller than the parameter "
            f"dimension ({features.shape[1]}); fits may be unstable without a prior",
            stacklevel=2,
        )

    order = Xoshiro256PlusPlus(spec.seed).shuffle_indices(n)

    if spec.stratified:
        quota = {1: spec.n_labeled // 2, 0: spec.n_labeled - spec.n_labeled // 2}
        labeled_idx: list[int] = []
        rest: list[int] = []
        for i in order:
            label = int(labels[i])
            if quota[label] > 0:
                quota[label] -= 1
                labeled_idx.append(i)
            else:
                rest.append(i)
        shortfall = spec.n_labeled - len(labeled_idx)
        if shortfall > 0:
            labeled_idx.extend(rest[:shortfall])
            rest = rest[shortfall:]
    else:
        labeled_idx = order[: spec.n_labeled]
        rest = order[spec.n_labeled :]

    unlabeled_idx = rest[: spec.n_unlabeled]
    test_idx = rest[spec.n_unlabeled : spec.n_unlabeled + spec.n_test]

    return SplitResult(
        labeled=LabeledSet(features[labeled_idx], labels[labeled_idx]),
        pool=UnlabeledPool(features[unlabeled_idx]),
        test=LabeledSet(features[test_idx], labels[test_idx]),
        pool_labels=labels[unlabeled_idx],
    )


def load_csv(path: str | Path, label_column: str, positive_label: str) -> tuple[np.ndarray, np.ndarray]:
    """Read a headered CSV into (features, labels).

    Prepends the intercept column; maps cells equal to
    ``positive_label`` in the label column to 1 and everything else to
    0. All other columns must be numeric and complete. Row numbers in
    errors are 1-based file lines (the header is line 1).
    """
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path} is empty", row=1) from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise UnknownColumnError(
                f"label column {label_column!r} not found in header {header}"
            )
        label_pos = header.index(label_column)
        feature_positions = [i for i in range(len(header)) if i != label_pos]

        rows: list[list[float]] = []
        labels: list[int] = []
        for line_no, record in enumerate(reader, start=2):
            if len(record) != len(header):
                raise CsvFormatError(
                    f"row {line_no} has {len(record)} fields, expected {len(header)}",
                    row=line_no,
                )
            values = [1.0]
            for pos in feature_positions:
                cell = record[pos].strip()
                if cell == "":
                    raise MissingValueError(
                        f"missing value at row {line_no}, column {header[pos]!r}",
                        row=line_no,
                        column=header[pos],
                    )
                try:
                    values.append(float(cell))
                except ValueError:
                    raise CsvFormatError(
                        f"cannot parse {cell!r} at row {line_no}, column {header[pos]!r}",
                        row=line_no,
                        column=header[pos],
                    ) from None
            label_cell = record[label_pos].strip()
            if label_cell == "":
                raise MissingValueError(
                    f"missing value at row {line_no}, column {label_column!r}",
                    row=line_no,
                    column=label_column,
                )
            rows.append(values)
            labels.append(1 if label_cell == positive_label else 0)

    if not rows:
        raise CsvFormatError(f"{path} has a header but no data rows", row=1)
    return np.asarray(rows, dtype=float), np.asarray(labels, dtype=int)


def save_csv(
    path: str | Path,
    features: np.ndarray,
    labels: np.ndarray,
    label_column: str = "label",
) -> None:
    """Write (features, labels) so that load_csv round-trips exactly.

    The intercept column is dropped on write (load_csv re-adds it);
    labels are written as "1"/"0", so reload with positive_label="1".
    Floats use repr, which round-trips exactly in IEEE double.
    """
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=int)
    d = features.shape[1] - 1
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"x{j + 1}" for j in range(d)] + [label_column])
        for row, label in zip(features, labels):
            writer.writerow([repr(float(v)) for v in row[1:]] + [str(int(label))])
