"""Seeded randomized equivalence checks behind ``qmc verify``.

Every check compares the density-matrix pipeline against something that does
not use it: counting Bayes, the stored-sample kernel mixture, the dense
reference pipeline, or the closed-form coherent-state kernel.  Each produced
training and output density matrix is also validated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .datasets import LabeledDataset
from .encoders import EncoderSpec, encode_coherent_scalar, fit_feature_map
from .errors import ZeroSupportError
from .oracles import DiscreteJoint, bayes_posterior, kernel_form_predict
from .prediction import predict_density_fast, predict_density_naive
from .states import validate_density
from .training import TrainedModel, train

# encoder settings for the kernel-form check
KERNEL_FORM_ENCODERS = (
    EncoderSpec("softmax", 2, 4),
    EncoderSpec("coherent", 2, 8),
    EncoderSpec("squeezed", 2, 8),
    EncoderSpec("rff", 2, rff_dim=32),
    EncoderSpec("onehot", 2, 4),
)


@dataclass
class CheckResult:
    name: str
    tolerance: float
    max_error: float = 0.0
    comparisons: int = 0
    mismatches: int = 0
    density_checked: int = 0
    density_failures: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.mismatches == 0 and self.density_failures == 0 and self.comparisons > 0

    def compare(self, got, want) -> None:
        err = float(np.max(np.abs(np.asarray(got) - np.asarray(want))))
        self.max_error = max(self.max_error, err)
        self.comparisons += 1
        if not err <= self.tolerance:
            self.mismatches += 1

    def disagree(self, note: str) -> None:
        self.comparisons += 1
        self.mismatches += 1
        if len(self.notes) < 5:
            self.notes.append(note)

    def density(self, rho) -> None:
        self.density_checked += 1
        if not validate_density(rho).ok:
            self.density_failures += 1

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (
            f"{status} {self.name}: max_error={self.max_error:.3e} tol={self.tolerance:.0e} "
            f"comparisons={self.comparisons} mismatches={self.mismatches} "
            f"densities={self.density_checked} invalid={self.density_failures}"
        )
        if self.notes:
            text += " (" + "; ".join(self.notes) + ")"
        return text


Fault = Callable[[TrainedModel], TrainedModel]


def perturb_fault(seed: int = 0, size: float = 1e-3) -> Fault:
    """Test hook: adds a small random Hermitian term to the training state."""

    def fault(model: TrainedModel) -> TrainedModel:
        rng = np.random.default_rng(seed)
        d = model.shape.dim
        h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        return replace(model, rho=model.rho + size * (h + h.conj().T))

    return fault


def _apply(model: TrainedModel, fault: Fault | None) -> TrainedModel:
    return fault(model) if fault is not None else model


def _measure(fn, *args):
    """Run a predictor; ZeroSupport is returned as ``None``."""
    try:
        return fn(*args)
    except ZeroSupportError:
        return None


def check_bayes_equivalence(seed: int = 0, n_datasets: int = 200, fault: Fault | None = None) -> CheckResult:
    """One-hot mixed and classical predictions vs counting Bayes."""
    rng = np.random.default_rng(seed)
    res = CheckResult("bayes-equivalence", 1e-10)
    for _ in range(n_datasets):
        m = int(rng.integers(2, 9))
        n = int(rng.integers(1, 51))
        xs = rng.integers(1, m + 1, size=n)
        ys = rng.integers(0, 2, size=n)
        data = LabeledDataset(xs[:, None].astype(float), ys, ["0", "1"])
        fmap = fit_feature_map(EncoderSpec("onehot", 1, m), data.features)
        joint = DiscreteJoint.from_samples(xs, ys, m, 2)
        for mode in ("mixed", "classical"):
            model = train(data, fmap, mode)
            res.density(model.rho)
            model = _apply(model, fault)
            for x_star in range(1, m + 1):
                got = _measure(predict_density_fast, model, [float(x_star)])
                try:
                    want = bayes_posterior(joint, x_star)
                except ZeroSupportError:
                    want = None
                if (got is None) != (want is None):
                    res.disagree(f"support mismatch at m={m}, x*={x_star}, {mode}")
                    continue
                if got is None:
                    res.comparisons += 1
                    continue
                res.density(got.rho_y)
                res.compare(got.probabilities, want)
    return res


def check_kernel_equivalence(
    seed: int = 0, n_datasets: int = 50, queries: int = 4, fault: Fault | None = None
) -> list[CheckResult]:
    """Mixed-state output states vs the stored-sample kernel mixture, per encoder."""
    results = []
    for spec in KERNEL_FORM_ENCODERS:
        rng = np.random.default_rng([seed, KERNEL_FORM_ENCODERS.index(spec)])
        res = CheckResult(f"kernel-equivalence[{spec.kind}]", 1e-8)
        for _ in range(n_datasets):
            n = int(rng.integers(2, 101))
            if spec.kind == "onehot":
                X = rng.integers(1, spec.per_feature_dim + 1, size=(n, 2)).astype(float)
                Q = rng.integers(1, spec.per_feature_dim + 1, size=(queries, 2)).astype(float)
            else:
                X = rng.normal(size=(n, 2))
                Q = rng.normal(size=(queries, 2))
            y = rng.integers(0, 2, size=n)
            data = LabeledDataset(X, y, ["0", "1"])
            fmap = fit_feature_map(spec, X)
            model = train(data, fmap, "mixed")
            res.density(model.rho)
            model = _apply(model, fault)
            for q in Q:
                got = _measure(predict_density_fast, model, q)
                try:
                    want = kernel_form_predict(data, fmap, q)
                except ZeroSupportError:
                    want = None
                if (got is None) != (want is None):
                    res.disagree(f"support mismatch for query {q.tolist()}")
                    continue
                if got is None:
                    res.comparisons += 1
                    continue
                res.density(got.rho_y)
                res.compare(got.rho_y, want)
        results.append(res)
    return results


def _random_small_model(rng: np.random.Generator):
    kind = str(rng.choice(["softmax", "onehot", "squeezed", "coherent", "rff"]))
    n_features = int(rng.integers(1, 3))
    l = int(rng.integers(2, 5))
    max_k = 64 // l
    if kind == "rff":
        spec = EncoderSpec(kind, n_features, rff_dim=int(rng.integers(2, max_k + 1)), rff_seed=int(rng.integers(1 << 30)))
    else:
        m_max = max_k if n_features == 1 else int(math.isqrt(max_k))
        spec = EncoderSpec(kind, n_features, int(rng.integers(2, m_max + 1)))
    n = int(rng.integers(2, 31))
    if kind == "onehot":
        X = rng.integers(1, spec.per_feature_dim + 1, size=(n, n_features)).astype(float)
        X[0], X[1] = 1.0, float(spec.per_feature_dim)
    else:
        X = rng.normal(size=(n, n_features))
    y = rng.integers(0, l, size=n)
    data = LabeledDataset(X, y, [str(c) for c in range(l)])
    mode = str(rng.choice(["pure", "mixed", "classical"]))
    return data, fit_feature_map(spec, X), mode


def check_fast_vs_naive(seed: int = 0, n_models: int = 100, queries: int = 3, fault: Fault | None = None) -> CheckResult:
    rng = np.random.default_rng(seed)
    res = CheckResult("fast-vs-naive", 1e-9)
    for _ in range(n_models):
        data, fmap, mode = _random_small_model(rng)
        model = train(data, fmap, mode)
        res.density(model.rho)
        # the fault only touches the fast path, so a perturbed state must disagree
        faulty = _apply(model, fault)
        picks = rng.integers(0, len(data), size=queries)
        for q in data.features[picks]:
            fast = _measure(predict_density_fast, faulty, q)
            naive = _measure(predict_density_naive, model, q)
            if (fast is None) != (naive is None):
                res.disagree("support mismatch")
                continue
            if fast is None:
                res.comparisons += 1
                continue
            res.density(naive.rho_y)
            res.compare(fast.rho_y, naive.rho_y)
            res.compare(fast.support, naive.support)
    return res


def coherent_closed_form(u: float, v: float, gamma: float) -> float:
    """Squared overlap of untruncated coherent states with ``alpha = s e^{i s}``."""
    return math.exp(-gamma * (u * u + v * v - 2 * u * v * math.cos(u - v)))


def check_coherent_kernel(gamma: float = 1.0, m: int = 32, grid: int = 20) -> CheckResult:
    res = CheckResult("coherent-closed-form", 1e-6)
    pts = np.linspace(0.0, math.pi, grid)
    states = encode_coherent_scalar(pts, pts, gamma, m)
    overlaps = np.abs(states.conj() @ states.T) ** 2
    want = np.array([[coherent_closed_form(u, v, gamma) for v in pts] for u in pts])
    for got_row, want_row in zip(overlaps, want):
        for g, w in zip(got_row, want_row):
            res.compare(g, w)
    return res


def run_all(seed: int = 0, fault: Fault | None = None, quick: bool = False) -> list[CheckResult]:
    scale = 0.2 if quick else 1.0
    return [
        check_bayes_equivalence(seed, max(1, int(200 * scale)), fault),
        *check_kernel_equivalence(seed, max(1, int(50 * scale)), fault=fault),
        check_fast_vs_naive(seed, max(1, int(100 * scale)), fault=fault),
        check_coherent_kernel(),
    ]
