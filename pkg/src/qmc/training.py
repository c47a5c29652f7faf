"""Training-state estimation.

A training set is summarized by a single density matrix on ``H_X (x) H_Y``.
Three estimators are available:

``pure``
    normalized superposition of the sample states, ``|psi><psi|``.
``mixed``
    average of the sample projectors ``|psi_i><psi_i|``.
``classical``
    diagonal matrix holding the averaged basis probabilities.

All three are computed in one pass through an :class:`Accumulator`, which
keeps only an amplitude sum, an outer-product sum, or a probability sum -
never the samples themselves.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .encoders import EncoderSpec, FeatureMap, FeatureScaler, RffProjection
from .errors import DegenerateSuperpositionError, EmptyTrainingError, ShapeError
from .states import BipartiteShape, purity

MODES = ("pure", "mixed", "classical")

_CHUNK = 512


def label_states(label_idx, num_classes: int) -> np.ndarray:
    """One-hot output states, shape ``(N, num_classes)``."""
    label_idx = np.asarray(label_idx, dtype=np.int64)
    out = np.zeros((label_idx.size, num_classes), dtype=complex)
    out[np.arange(label_idx.size), label_idx] = 1.0
    return out


def joint_states(psi_x: np.ndarray, psi_y: np.ndarray) -> np.ndarray:
    """Row-wise ``psi_x (x) psi_y``."""
    return (psi_x[:, :, None] * psi_y[:, None, :]).reshape(psi_x.shape[0], -1)


@dataclass
class Accumulator:
    """Running sum for one of the three estimators.

    Sums are commutative, so accumulators built over disjoint parts of a
    dataset can be combined with :meth:`merge` in any order.
    """

    mode: str
    shape: BipartiteShape
    count: int = 0
    buffer: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown training mode {self.mode!r}")
        if self.buffer is None:
            d = self.shape.dim
            if self.mode == "pure":
                self.buffer = np.zeros(d, dtype=complex)
            elif self.mode == "mixed":
                self.buffer = np.zeros((d, d), dtype=complex)
            else:
                self.buffer = np.zeros(d, dtype=float)

    def add(self, states: np.ndarray) -> "Accumulator":
        """Absorb joint states, a single vector or an ``(N, dim)`` batch."""
        states = np.atleast_2d(np.asarray(states, dtype=complex))
        if states.shape[1] != self.shape.dim:
            raise ShapeError(f"state dim {states.shape[1]} != {self.shape.dim}")
        if self.mode == "pure":
            self.buffer += states.sum(axis=0)
        elif self.mode == "mixed":
            # sum_i |psi_i><psi_i| = Psi^T conj(Psi)
            self.buffer += states.T @ states.conj()
        else:
            self.buffer += (states.real**2 + states.imag**2).sum(axis=0)
        self.count += states.shape[0]
        return self

    def merge(self, other: "Accumulator") -> "Accumulator":
        if other.mode != self.mode or other.shape != self.shape:
            raise ShapeError("cannot merge accumulators of different mode or shape")
        return Accumulator(self.mode, self.shape, self.count + other.count, self.buffer + other.buffer)

    def density(self) -> np.ndarray:
        """Normalized training density matrix."""
        if self.count == 0:
            raise EmptyTrainingError("no samples were accumulated")
        if self.mode == "pure":
            norm = np.linalg.norm(self.buffer)
            if norm <= 1e-12:
                raise DegenerateSuperpositionError(
                    f"superposition of training states has norm {norm:.3e}"
                )
            psi = self.buffer / norm
            return np.outer(psi, psi.conj())
        if self.mode == "mixed":
            rho = self.buffer / self.count
            # enforce exact Hermiticity lost to BLAS rounding
            return 0.5 * (rho + rho.conj().T)
        return np.diag(self.buffer / self.count).astype(complex)


@dataclass(frozen=True)
class TrainedModel:
    """A finalized training state plus everything needed to encode queries."""

    rho: np.ndarray
    shape: BipartiteShape
    feature_map: FeatureMap
    labels: tuple[str, ...]
    mode: str
    n_train: int

    @property
    def spec(self) -> EncoderSpec:
        return self.feature_map.spec

    @property
    def scaler(self) -> FeatureScaler | None:
        return self.feature_map.scaler

    @property
    def proj(self) -> RffProjection | None:
        return self.feature_map.proj

    @property
    def purity(self) -> float:
        return purity(self.rho)


def finalize(acc: Accumulator, feature_map: FeatureMap, labels) -> TrainedModel:
    rho = acc.density()
    return TrainedModel(rho, acc.shape, feature_map, tuple(labels), acc.mode, acc.count)


def accumulate(
    acc: Accumulator, X, label_idx, feature_map: FeatureMap, chunk: int = _CHUNK
) -> Accumulator:
    """Encode ``(X, labels)`` in chunks and add them to ``acc``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    label_idx = np.asarray(label_idx, dtype=np.int64)
    for start in range(0, X.shape[0], chunk):
        stop = start + chunk
        psi_x = feature_map.encode(X[start:stop])
        psi_y = label_states(label_idx[start:stop], acc.shape.dim_y)
        acc.add(joint_states(psi_x, psi_y))
    return acc


def train(data, feature_map: FeatureMap, mode: str = "mixed") -> TrainedModel:
    """Estimate the training state of ``data`` (a LabeledDataset)."""
    shape = BipartiteShape(feature_map.dim, len(data.class_names))
    acc = accumulate(Accumulator(mode, shape), data.features, data.labels, feature_map)
    return finalize(acc, feature_map, data.class_names)


def train_pure(data, feature_map: FeatureMap) -> TrainedModel:
    return train(data, feature_map, "pure")


def train_mixed(data, feature_map: FeatureMap) -> TrainedModel:
    return train(data, feature_map, "mixed")


def train_classical(data, feature_map: FeatureMap) -> TrainedModel:
    return train(data, feature_map, "classical")
