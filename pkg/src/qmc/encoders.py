"""Quantum feature maps from real feature vectors to unit state vectors.

Five maps are supported:

* ``softmax``  - per feature, square roots of a softmax over an even grid on [0, 1]
* ``onehot``   - per feature, basis encoding of a category ``1..m``
* ``squeezed`` - per feature, squeezed vacuum with the feature as phase
* ``coherent`` - per feature, truncated coherent state ``|(a e^{i theta}, gamma)>``
* ``rff``      - whole-vector random Fourier features for a Gaussian kernel

Per-feature maps are combined with a tensor product (dimension ``m**n``); RFF
produces one ``D``-dimensional state.  Every function here accepts numpy
arrays and broadcasts over leading axes, so ``encode_batch`` is the work-horse
for training and prediction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import (
    DegenerateFeatureError,
    InvalidCategoryError,
    ShapeError,
    ZeroVectorError,
)

KINDS = ("softmax", "onehot", "squeezed", "coherent", "rff")

DEFAULT_BETA = 70.0
DEFAULT_GAMMA = {"coherent": 70.0, "rff": 20.0}
DEFAULT_R = 2.5
DEFAULT_FOCK = 20

_TARGETS = {
    "softmax": (0.0, 1.0),
    "coherent": (0.0, 1.0),
    "squeezed": (0.0, math.pi),
    "rff": (0.0, 1.0),
}


@dataclass(frozen=True)
class EncoderSpec:
    """Feature-map choice and hyperparameters.

    Parameters that do not apply to ``kind`` are dropped; the ones that do
    apply but are left as ``None`` get their defaults.
    """

    kind: str
    num_features: int
    per_feature_dim: int = DEFAULT_FOCK
    beta: float | None = None
    gamma: float | None = None
    r: float | None = None
    rff_dim: int | None = None
    rff_seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown encoding {self.kind!r}; expected one of {KINDS}")
        if self.num_features < 1:
            raise ValueError("num_features must be positive")
        kind = self.kind
        set_ = lambda name, value: object.__setattr__(self, name, value)  # noqa: E731
        set_("beta", (self.beta if self.beta is not None else DEFAULT_BETA) if kind == "softmax" else None)
        if kind in DEFAULT_GAMMA:
            set_("gamma", float(self.gamma) if self.gamma is not None else DEFAULT_GAMMA[kind])
        else:
            set_("gamma", None)
        set_("r", (self.r if self.r is not None else DEFAULT_R) if kind == "squeezed" else None)
        if kind == "rff":
            dim = self.rff_dim if self.rff_dim is not None else self.per_feature_dim**self.num_features
            set_("rff_dim", int(dim))
            set_("rff_seed", int(self.rff_seed) if self.rff_seed is not None else 0)
            if self.rff_dim < 1:
                raise ValueError("rff_dim must be >= 1")
        else:
            set_("rff_dim", None)
            set_("rff_seed", None)
            if self.per_feature_dim < 2:
                raise ValueError(f"per_feature_dim must be >= 2 for {kind}")
        if self.beta is not None and self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.r is not None and self.r < 0:
            raise ValueError("r must be nonnegative")

    @property
    def dim(self) -> int:
        """Dimension of the encoded input space."""
        if self.kind == "rff":
            return self.rff_dim
        return self.per_feature_dim**self.num_features

    @property
    def scale_target(self) -> tuple[float, float] | None:
        return _TARGETS.get(self.kind)

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass(frozen=True)
class FeatureScaler:
    """Per-column min-max map onto ``[low, high]`` with clamping."""

    mins: np.ndarray
    maxs: np.ndarray
    low: float = 0.0
    high: float = 1.0

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != len(self.mins):
            raise ShapeError(f"expected {len(self.mins)} features, got {X.shape[-1]}")
        unit = np.clip((X - self.mins) / (self.maxs - self.mins), 0.0, 1.0)
        return self.low + (self.high - self.low) * unit

    def to_dict(self) -> dict:
        return {
            "mins": [float(v) for v in self.mins],
            "maxs": [float(v) for v in self.maxs],
            "target": [self.low, self.high],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureScaler":
        return cls(np.array(d["mins"], dtype=float), np.array(d["maxs"], dtype=float), *map(float, d["target"]))


def fit_scaler(X, target: tuple[float, float] = (0.0, 1.0)) -> FeatureScaler:
    """Fit column ranges of ``X``; constant columns raise DegenerateFeatureError."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 0:
        raise ValueError("cannot fit a scaler on an empty dataset")
    mins, maxs = X.min(axis=0), X.max(axis=0)
    constant = np.flatnonzero(maxs <= mins)
    if constant.size:
        raise DegenerateFeatureError(f"constant feature column(s): {constant.tolist()}")
    return FeatureScaler(mins, maxs, float(target[0]), float(target[1]))


@dataclass(frozen=True)
class RffProjection:
    frequencies: np.ndarray  # (D, n)
    offsets: np.ndarray  # (D,)
    gamma: float
    seed: int

    @property
    def dim(self) -> int:
        return self.frequencies.shape[0]

    def to_dict(self) -> dict:
        return {
            "frequencies": self.frequencies.tolist(),
            "offsets": self.offsets.tolist(),
            "gamma": self.gamma,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RffProjection":
        freqs = np.array(d["frequencies"], dtype=float)
        return cls(freqs, np.array(d["offsets"], dtype=float), float(d["gamma"]), int(d["seed"]))


def make_rff_projection(spec: EncoderSpec) -> RffProjection:
    """Draw Gaussian-kernel frequencies ``w ~ N(0, 2 gamma I)`` and offsets ``b ~ U[0, 2pi)``."""
    if spec.kind != "rff":
        raise ValueError("make_rff_projection requires an rff spec")
    rng = np.random.default_rng(spec.rff_seed)
    freqs = rng.normal(0.0, math.sqrt(2.0 * spec.gamma), size=(spec.rff_dim, spec.num_features))
    offsets = rng.uniform(0.0, 2.0 * math.pi, size=spec.rff_dim)
    return RffProjection(freqs, offsets, spec.gamma, spec.rff_seed)


# ---------------------------------------------------------------- scalar maps


def _normalize_rows(a: np.ndarray) -> np.ndarray:
    return a / np.linalg.norm(a, axis=-1, keepdims=True)


def encode_softmax_scalar(x, m: int, beta: float) -> np.ndarray:
    """Amplitudes ``sqrt(P_j(x))`` with ``P = softmax(-beta (x - a_j)^2)``, ``a_j = j/(m-1)``.

    Inputs are clamped to [0, 1].  Output has shape ``x.shape + (m,)``.
    """
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    grid = np.linspace(0.0, 1.0, m)
    logits = -beta * (x[..., None] - grid) ** 2
    logits -= logits.max(axis=-1, keepdims=True)
    p = np.exp(logits)
    p /= p.sum(axis=-1, keepdims=True)
    return np.sqrt(p).astype(complex)


def encode_onehot(j, m: int) -> np.ndarray:
    """Basis vector ``e_{j-1}`` of dimension ``m`` for category ``j`` in ``1..m``."""
    j = np.asarray(j)
    idx = np.rint(j).astype(np.int64) if j.size else j.astype(np.int64)
    bad = (idx < 1) | (idx > m) | (np.abs(j - idx) > 0)
    if np.any(bad):
        raise InvalidCategoryError(f"category {np.asarray(j)[bad].ravel()[0]!r} not in 1..{m}")
    out = np.zeros(idx.shape + (m,), dtype=complex)
    np.put_along_axis(out, (idx - 1)[..., None], 1.0, axis=-1)
    return out


def squeezed_log_magnitudes(r: float, m: int) -> np.ndarray:
    """``log |c_n|`` for the first ``m`` even-level amplitudes, before truncation."""
    n = np.arange(m)
    t = math.tanh(r)
    mags = -0.5 * math.log(math.cosh(r)) + 0.5 * gammaln(2 * n + 1) - n * math.log(2.0) - gammaln(n + 1)
    if t == 0.0:
        return np.where(n == 0, mags, -np.inf)
    return mags + n * math.log(t)


def encode_squeezed_scalar(phi, r: float, m: int) -> np.ndarray:
    """Squeezed vacuum ``|(r, phi)>`` truncated to its first ``m`` nonzero levels.

    Index ``n`` holds the coefficient of Fock state ``|2n>``; odd levels are
    identically zero and are not stored.  The result is renormalized.
    """
    phi = np.asarray(phi, dtype=float)
    logmag = squeezed_log_magnitudes(r, m)
    mags = np.exp(logmag - logmag.max())
    n = np.arange(m)
    phase = np.exp(1j * n * (phi[..., None] + math.pi))
    return _normalize_rows(mags * phase)


def encode_coherent_scalar(x, theta, gamma: float, m: int) -> np.ndarray:
    """Coherent state ``|(x e^{i theta}, gamma)>`` truncated to Fock levels ``0..m-1``.

    Amplitudes are built in the log domain; the ``exp(-gamma |alpha|^2 / 2)``
    prefactor cancels on renormalization and is never evaluated.
    """
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)
    x, theta = np.broadcast_arrays(x, theta)
    modulus = np.abs(x)
    arg = theta + np.where(x < 0, math.pi, 0.0)
    n = np.arange(m)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_rho = np.log(modulus * math.sqrt(gamma))[..., None]
        logmag = np.where(n == 0, 0.0, n * log_rho) - 0.5 * gammaln(n + 1)
    logmag = logmag - logmag.max(axis=-1, keepdims=True)
    amps = np.exp(logmag) * np.exp(1j * n * arg[..., None])
    return _normalize_rows(amps)


def rff_features(X, proj: RffProjection) -> np.ndarray:
    """Unnormalized ``z(x) = sqrt(2/D) cos(w x + b)``, shape ``(..., D)``."""
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != proj.frequencies.shape[1]:
        raise ShapeError(f"expected {proj.frequencies.shape[1]} features, got {X.shape[-1]}")
    return math.sqrt(2.0 / proj.dim) * np.cos(X @ proj.frequencies.T + proj.offsets)


def encode_rff_vector(x, proj: RffProjection) -> np.ndarray:
    z = rff_features(x, proj)
    norms = np.linalg.norm(z, axis=-1, keepdims=True)
    if np.any(norms == 0.0):
        raise ZeroVectorError("random Fourier feature vector has zero norm")
    return (z / norms).astype(complex)


# ---------------------------------------------------------------- full samples


def _kron_rows(factors: list[np.ndarray]) -> np.ndarray:
    out = factors[0]
    for f in factors[1:]:
        out = (out[:, :, None] * f[:, None, :]).reshape(out.shape[0], -1)
    return out


def _per_feature_states(scaled: np.ndarray, spec: EncoderSpec) -> list[np.ndarray]:
    m = spec.per_feature_dim
    cols = [scaled[:, j] for j in range(scaled.shape[1])]
    if spec.kind == "softmax":
        return [encode_softmax_scalar(c, m, spec.beta) for c in cols]
    if spec.kind == "onehot":
        return [encode_onehot(c, m) for c in cols]
    if spec.kind == "squeezed":
        return [encode_squeezed_scalar(c, spec.r, m) for c in cols]
    if spec.kind == "coherent":
        # unit-scaled u gives modulus 2u - 1 in [-1, 1] and phase pi * u in [0, pi]
        return [encode_coherent_scalar(2.0 * c - 1.0, math.pi * c, spec.gamma, m) for c in cols]
    raise ValueError(spec.kind)


def encode_batch(
    X,
    spec: EncoderSpec,
    scaler: FeatureScaler | None = None,
    proj: RffProjection | None = None,
) -> np.ndarray:
    """Encode every row of ``X``; returns a complex ``(N, spec.dim)`` array."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != spec.num_features:
        raise ShapeError(f"expected {spec.num_features} features, got {X.shape[1]}")
    scaled = scaler.transform(X) if scaler is not None else X
    if spec.kind == "rff":
        if proj is None:
            raise ValueError("rff encoding requires a projection")
        return encode_rff_vector(scaled, proj)
    if X.shape[0] == 0:
        return np.zeros((0, spec.dim), dtype=complex)
    return _kron_rows(_per_feature_states(scaled, spec))


def encode_sample(
    x,
    spec: EncoderSpec,
    scaler: FeatureScaler | None = None,
    proj: RffProjection | None = None,
) -> np.ndarray:
    """Encode a single feature vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ShapeError("encode_sample expects a 1-D feature vector")
    return encode_batch(x[None, :], spec, scaler, proj)[0]


@dataclass(frozen=True)
class FeatureMap:
    """An encoder spec together with its fitted scaler and RFF projection."""

    spec: EncoderSpec
    scaler: FeatureScaler | None = None
    proj: RffProjection | None = field(default=None)

    @property
    def dim(self) -> int:
        return self.spec.dim

    def encode(self, X) -> np.ndarray:
        return encode_batch(X, self.spec, self.scaler, self.proj)


def fit_feature_map(spec: EncoderSpec, X) -> FeatureMap:
    """Fit the scaler (if the map uses one) and draw the RFF projection."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != spec.num_features:
        raise ShapeError(f"spec expects {spec.num_features} features, data has {X.shape[1]}")
    scaler = fit_scaler(X, spec.scale_target) if spec.scale_target is not None else None
    proj = make_rff_projection(spec) if spec.kind == "rff" else None
    return FeatureMap(spec, scaler, proj)
