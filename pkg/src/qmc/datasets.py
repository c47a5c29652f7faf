"""Toy 2-D benchmarks, CSV I/O, stratified splits and accuracy."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidSplitError, ParseError, SchemaError, UnknownDatasetError

GENERATORS = ("moons", "circles", "spirals")

DEFAULT_N = 1000
DEFAULT_NOISE = {"moons": 0.1, "circles": 0.15, "spirals": 0.5}
DEFAULT_SEED = 42
DEFAULT_TEST_FRACTION = 0.5

SPIRAL_TURN = 3 * math.pi


@dataclass
class LabeledDataset:
    """Real feature rows with categorical labels.

    ``labels`` holds indices into ``class_names``; class names are strings.
    """

    features: np.ndarray
    labels: np.ndarray
    class_names: list[str]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=float))
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        self.class_names = [str(c) for c in self.class_names]
        if self.features.shape[0] != self.labels.size:
            raise SchemaError("features and labels differ in length")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= len(self.class_names)):
            raise SchemaError("label index outside class_names")

    def __len__(self) -> int:
        return self.labels.size

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    @property
    def label_names(self) -> list[str]:
        return [self.class_names[i] for i in self.labels]

    @classmethod
    def from_labels(cls, features, names, meta: dict | None = None) -> "LabeledDataset":
        """Build from raw label values; class order is first appearance."""
        classes: dict[str, int] = {}
        idx = [classes.setdefault(str(n), len(classes)) for n in names]
        return cls(features, np.array(idx, dtype=np.int64), list(classes), meta or {})

    def subset(self, rows) -> "LabeledDataset":
        return LabeledDataset(self.features[rows], self.labels[rows], self.class_names, dict(self.meta))


# ---------------------------------------------------------------- generators


def _moons(n0: int, n1: int):
    t0 = np.linspace(0.0, math.pi, n0)
    t1 = np.linspace(0.0, math.pi, n1)
    upper = np.column_stack([np.cos(t0), np.sin(t0)])
    lower = np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)])
    return upper, lower


def _circles(n0: int, n1: int):
    t0 = np.linspace(0.0, 2 * math.pi, n0, endpoint=False)
    t1 = np.linspace(0.0, 2 * math.pi, n1, endpoint=False)
    outer = np.column_stack([np.cos(t0), np.sin(t0)])
    inner = 0.5 * np.column_stack([np.cos(t1), np.sin(t1)])
    return outer, inner


def spiral_arm(theta: np.ndarray, phase: float) -> np.ndarray:
    """Arm points in arm-local units, where the radius equals the angle."""
    return np.column_stack([theta * np.cos(theta + phase), theta * np.sin(theta + phase)])


def generate(name: str, n: int = DEFAULT_N, noise: float | None = None, seed: int = DEFAULT_SEED) -> LabeledDataset:
    """Two-class toy dataset with ``n // 2`` points in class 0 and the rest in class 1.

    ``moons``: upper unit half-circle and a lower one centred at (1, 0.5).
    ``circles``: unit circle and a concentric circle of radius 0.5.
    ``spirals``: two Archimedean arms over ``theta in [0, 3 pi]`` in opposite
    phase, rescaled so the radius is ``theta / (3 pi)``.  Spiral noise is
    applied before rescaling, i.e. in units where the arms are ``pi`` apart.
    """
    if name not in GENERATORS:
        raise UnknownDatasetError(f"unknown dataset {name!r}; expected one of {GENERATORS}")
    if n < 2:
        raise ValueError("n must be at least 2")
    if noise is None:
        noise = DEFAULT_NOISE[name]
    if noise < 0:
        raise ValueError("noise must be nonnegative")
    rng = np.random.default_rng(seed)
    n0 = n // 2
    n1 = n - n0
    if name == "spirals":
        a = spiral_arm(np.linspace(0.0, SPIRAL_TURN, n0), 0.0)
        b = spiral_arm(np.linspace(0.0, SPIRAL_TURN, n1), math.pi)
        X = np.vstack([a, b])
        X = (X + noise * rng.standard_normal(X.shape)) / SPIRAL_TURN
    else:
        a, b = _moons(n0, n1) if name == "moons" else _circles(n0, n1)
        X = np.vstack([a, b])
        X = X + noise * rng.standard_normal(X.shape)
    y = np.concatenate([np.zeros(n0, dtype=np.int64), np.ones(n1, dtype=np.int64)])
    meta = {"name": name, "n": n, "noise": noise, "seed": seed}
    return LabeledDataset(X, y, ["0", "1"], meta)


def split(data: LabeledDataset, test_fraction: float = DEFAULT_TEST_FRACTION, seed: int = DEFAULT_SEED):
    """Stratified random split into ``(train, test)``.

    Each class contributes ``round(count * test_fraction)`` rows to the test
    part; both parts keep the original row order.
    """
    if not 0.0 < test_fraction < 1.0:
        raise InvalidSplitError("test_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    test_mask = np.zeros(len(data), dtype=bool)
    for c in np.unique(data.labels):
        rows = np.flatnonzero(data.labels == c)
        n_test = int(round(rows.size * test_fraction))
        test_mask[rng.permutation(rows)[:n_test]] = True
    if test_mask.all() or not test_mask.any():
        raise InvalidSplitError(f"test_fraction {test_fraction} leaves one side empty")
    train, test = data.subset(~test_mask), data.subset(test_mask)
    train.meta.update(split="train", test_fraction=test_fraction, split_seed=seed)
    test.meta.update(split="test", test_fraction=test_fraction, split_seed=seed)
    return train, test


def accuracy(predicted, truth) -> float:
    predicted, truth = list(predicted), list(truth)
    if len(predicted) != len(truth):
        raise ValueError(f"length mismatch: {len(predicted)} predictions vs {len(truth)} labels")
    if not truth:
        raise ValueError("accuracy of an empty set is undefined")
    return sum(p == t for p, t in zip(predicted, truth)) / len(truth)


# ---------------------------------------------------------------- CSV


def write_csv(data: LabeledDataset, path) -> None:
    """Write ``f1,...,fn,label`` with 17 significant digits per value."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"f{j + 1}" for j in range(data.num_features)] + ["label"])
        for row, name in zip(data.features, data.label_names):
            writer.writerow([f"{v:.17g}" for v in row] + [name])


def read_csv(path) -> LabeledDataset:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if not header or header[-1] != "label":
        raise SchemaError(f"{path}: last header column must be 'label', got {header}")
    n_features = len(header) - 1
    if n_features < 1:
        raise SchemaError(f"{path}: no feature columns")
    features, names = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
        try:
            features.append([float(v) for v in row[:-1]])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        names.append(row[-1].strip())
    X = np.array(features, dtype=float).reshape(len(features), n_features)
    return LabeledDataset.from_labels(X, names, {"source": str(Path(path))})
