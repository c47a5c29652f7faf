"""Wall-clock timing of training and single-query prediction."""
from __future__ import annotations

import time

import numpy as np

from .datasets import LabeledDataset
from .encoders import EncoderSpec, fit_feature_map
from .prediction import predict_density_fast, predict_density_naive
from .training import train

DEFAULT_SIZES = (2000, 4000, 8000)


def _best_of(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def synthetic(n: int, n_features: int = 2, num_classes: int = 2, seed: int = 0) -> LabeledDataset:
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(n, n_features))
    X[0], X[1] = 0.0, 1.0
    y = np.arange(n) % num_classes
    return LabeledDataset(X, y, [str(c) for c in range(num_classes)])


def time_training(
    spec: EncoderSpec, sizes=DEFAULT_SIZES, mode: str = "mixed", repeats: int = 3, seed: int = 0
) -> dict:
    """Best-of-``repeats`` training time for each dataset size."""
    largest = synthetic(max(sizes), spec.num_features, seed=seed)
    fmap = fit_feature_map(spec, largest.features)
    times = {}
    for n in sizes:
        data = largest.subset(np.arange(n))
        train(data, fmap, mode)  # warm-up
        times[n] = _best_of(lambda: train(data, fmap, mode), repeats)
    ratios = {f"{b}/{a}": times[b] / times[a] for a, b in zip(sizes, sizes[1:])}
    if len(sizes) > 1:
        ratios[f"{sizes[-1]}/{sizes[0]}"] = times[sizes[-1]] / times[sizes[0]]
    return {"train_seconds": {str(n): t for n, t in times.items()}, "train_ratios": ratios}


def time_prediction(spec: EncoderSpec, mode: str = "mixed", n_train: int = 500, queries: int = 5, seed: int = 0) -> dict:
    """Average per-query seconds for the naive and fast paths on one model."""
    data = synthetic(n_train, spec.num_features, seed=seed)
    model = train(data, fit_feature_map(spec, data.features), mode)
    xs = np.random.default_rng(seed + 1).uniform(size=(queries, spec.num_features))
    naive = _best_of(lambda: [predict_density_naive(model, x) for x in xs], 1) / queries
    fast = _best_of(lambda: [predict_density_fast(model, x) for x in xs], 3) / queries
    return {
        "predict_dims": {"k": model.shape.dim_x, "l": model.shape.dim_y, "kl": model.shape.dim},
        "naive_seconds_per_query": naive,
        "fast_seconds_per_query": fast,
        "speedup": naive / fast,
    }
