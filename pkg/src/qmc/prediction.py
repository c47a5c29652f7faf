"""Prediction by projective measurement and partial trace.

For a query ``x*`` the measurement projector is
``pi = |psi_X(x*)><psi_X(x*)| (x) Id_Y``.  The reduced output state is

    rho'_Y = Tr_X[pi rho pi] / Tr[pi rho pi],

and because ``pi`` is a product operator its entries collapse to
``<psi (x) a| rho |psi (x) b>``.  :func:`predict_density_fast` evaluates only
that contraction; :func:`predict_density_naive` builds every operator and is
kept as a reference.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import QMCError, ShapeError, ZeroSupportError
from .states import (
    SUPPORT_RTOL,
    BipartiteShape,
    outer_product,
    partial_trace_out_x,
    project_and_renormalize,
)
from .training import TrainedModel

# complex entries held by one chunk of the batched contraction
_CHUNK_BUDGET = 1 << 22


@dataclass(frozen=True)
class PredictionResult:
    rho_y: np.ndarray
    probabilities: np.ndarray
    label: str
    support: float


def prediction_operator(psi_x: np.ndarray, shape: BipartiteShape) -> np.ndarray:
    """Dense ``|psi><psi| (x) Id_l``; only used on the reference path."""
    psi_x = np.asarray(psi_x, dtype=complex)
    if psi_x.shape != (shape.dim_x,):
        raise ShapeError(f"query state of dim {psi_x.shape} vs dim_x {shape.dim_x}")
    return np.kron(outer_product(psi_x), np.eye(shape.dim_y))


def predict_label(probabilities, labels) -> str:
    """Most probable class; ``np.argmax`` already breaks ties toward the lowest index."""
    return labels[int(np.argmax(probabilities))]


def _result(rho_y: np.ndarray, support: float, labels) -> PredictionResult:
    probs = np.clip(np.diagonal(rho_y).real, 0.0, None)
    probs = probs / probs.sum()
    return PredictionResult(rho_y, probs, predict_label(probs, labels), support)


def predict_density_naive(model: TrainedModel, x_star) -> PredictionResult:
    psi = model.feature_map.encode(x_star)[0]
    pi = prediction_operator(psi, model.shape)
    # Tr[pi rho pi] = Tr[pi rho] for a projector
    support = float(np.einsum("ij,ji->", pi, model.rho).real)
    rho_prime = project_and_renormalize(model.rho, pi)
    rho_y = partial_trace_out_x(rho_prime, model.shape)
    return _result(rho_y, support, model.labels)


def contract_queries(rho: np.ndarray, shape: BipartiteShape, psi: np.ndarray):
    """Unnormalized reduced states ``<psi_n (x) a| rho |psi_n (x) b>`` for each row of ``psi``.

    Returns ``(rho_y, support)`` with shapes ``(N, l, l)`` and ``(N,)``.
    """
    k, l = shape.dim_x, shape.dim_y
    if psi.ndim != 2 or psi.shape[1] != k:
        raise ShapeError(f"query states of shape {psi.shape} vs dim_x {k}")
    flat = rho.reshape(k, l * k * l)
    left = (psi.conj() @ flat).reshape(-1, l, k, l)
    rho_y = np.einsum("najb,nj->nab", left, psi)
    support = np.einsum("naa->n", rho_y).real
    return rho_y, support


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("QMC_THREADS", "1")))
    except ValueError:
        return 1


def predict_arrays(model: TrainedModel, X):
    """Vectorized fast path.

    Returns normalized ``rho_y`` of shape ``(N, l, l)``, the raw supports and
    a boolean mask of zero-support rows (whose ``rho_y`` is left as zeros).
    Rows are processed in chunks, fanned out over ``QMC_THREADS`` workers.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    k, l = model.shape.dim_x, model.shape.dim_y
    n = X.shape[0]
    chunk = max(1, _CHUNK_BUDGET // (k * l * l))
    bounds = [(s, min(s + chunk, n)) for s in range(0, n, chunk)]
    threshold = SUPPORT_RTOL * float(np.trace(model.rho).real)

    def run(b):
        psi = model.feature_map.encode(X[b[0]:b[1]])
        return contract_queries(model.rho, model.shape, psi)

    workers = _workers()
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, bounds))
    else:
        parts = [run(b) for b in bounds]
    if parts:
        rho_y = np.concatenate([p[0] for p in parts])
        support = np.concatenate([p[1] for p in parts])
    else:
        rho_y = np.zeros((0, l, l), dtype=complex)
        support = np.zeros(0)
    zero = support <= threshold
    safe = np.where(zero, 1.0, support)
    rho_y = np.where(zero[:, None, None], 0.0, rho_y / safe[:, None, None])
    return rho_y, support, zero


def predict_density_fast(model: TrainedModel, x_star) -> PredictionResult:
    rho_y, support, zero = predict_arrays(model, np.asarray(x_star, dtype=float)[None, :])
    if zero[0]:
        raise ZeroSupportError(float(support[0]))
    return _result(rho_y[0], float(support[0]), model.labels)


def predict(model: TrainedModel, x_star, naive: bool = False) -> PredictionResult:
    return predict_density_naive(model, x_star) if naive else predict_density_fast(model, x_star)


def predict_batch(model: TrainedModel, xs) -> list[PredictionResult | QMCError]:
    """Per-row predictions; a failing row yields its exception in place of a result."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    rho_y, support, zero = predict_arrays(model, xs)
    out: list[PredictionResult | QMCError] = []
    for i in range(xs.shape[0]):
        if zero[i]:
            out.append(ZeroSupportError(float(support[i])))
        else:
            out.append(_result(rho_y[i], float(support[i]), model.labels))
    return out


def predict_proba(model: TrainedModel, X):
    """Class probabilities ``(N, l)``; zero-support rows get the uniform vector.

    Also returns the supports and the zero-support mask.
    """
    rho_y, support, zero = predict_arrays(model, X)
    probs = np.clip(np.einsum("naa->na", rho_y).real, 0.0, None)
    l = model.shape.dim_y
    sums = probs.sum(axis=1, keepdims=True)
    probs = np.where(zero[:, None], 1.0 / l, probs / np.where(sums > 0, sums, 1.0))
    return probs, support, zero


def predict_labels(model: TrainedModel, X) -> list[str]:
    probs, _, _ = predict_proba(model, X)
    return [model.labels[i] for i in np.argmax(probs, axis=1)]
