"""Independent reference predictors used to cross-check the measurement pipeline.

``bayes_posterior`` is plain counting Bayes on a discrete joint table, which
the one-hot measurement classifier must reproduce exactly.  ``kernel_form_predict``
keeps every training sample and forms the kernel-weighted mixture of label
projectors, which equals the mixed-state prediction for any feature map.
Neither touches a training density matrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoders import FeatureMap
from .errors import InvalidCategoryError, ZeroSupportError


@dataclass(frozen=True)
class DiscreteJoint:
    """Count table ``counts[x - 1, y]`` over categories ``1..m`` and class indices."""

    counts: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_samples(cls, xs, ys, m: int, num_classes: int) -> "DiscreteJoint":
        counts = np.zeros((m, num_classes), dtype=np.int64)
        for x, y in zip(xs, ys):
            counts[int(x) - 1, int(y)] += 1
        return cls(counts)


def bayes_posterior(joint: DiscreteJoint, x_star: int) -> np.ndarray:
    """``P(y | x*)`` estimated by counting."""
    m = joint.counts.shape[0]
    if not 1 <= x_star <= m:
        raise InvalidCategoryError(f"category {x_star} not in 1..{m}")
    row = joint.counts[x_star - 1].astype(float)
    total = row.sum()
    if total == 0:
        raise ZeroSupportError(0.0, f"category {x_star} never observed")
    return row / total


def _label_projectors(label_idx, num_classes: int) -> np.ndarray:
    eye = np.eye(num_classes, dtype=complex)
    return eye[np.asarray(label_idx)]


def kernel_weights(feature_map: FeatureMap, X_train, x_star) -> np.ndarray:
    """``|<psi(x*)|psi(x_i)>|^2`` for each training row."""
    psi_train = feature_map.encode(X_train)
    psi_star = feature_map.encode(x_star)[0]
    return np.abs(psi_train @ psi_star.conj()) ** 2


def kernel_form_predict(data, feature_map: FeatureMap, x_star) -> np.ndarray:
    """Normalized ``sum_i |k(x*, x_i)|^2 |y_i><y_i|`` over the stored training set."""
    w = kernel_weights(feature_map, data.features, x_star)
    if w.sum() <= 1e-300:
        raise ZeroSupportError(float(w.sum()))
    ys = _label_projectors(data.labels, len(data.class_names))
    rho_y = np.einsum("i,ia,ib->ab", w, ys, ys.conj())
    return rho_y / np.trace(rho_y).real


def gram_kernel(data, feature_map: FeatureMap) -> np.ndarray:
    """Matrix of squared overlaps ``|<psi(x_i)|psi(x_j)>|^2``."""
    return np.abs(complex_gram(data, feature_map)) ** 2


def complex_gram(data, feature_map: FeatureMap) -> np.ndarray:
    psi = feature_map.encode(data.features)
    return psi.conj() @ psi.T
