"""Dense state-vector and density-matrix algebra.

States are plain complex numpy arrays: a state vector is 1-D with unit norm, a
density matrix is 2-D, Hermitian, PSD and of unit trace.  Bipartite indices are
flattened row-major with the input subsystem X as the slow index, so basis
state ``|i> (x) |a>`` lives at position ``i * dim_y + a``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, ZeroSupportError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = -1e-9
SUPPORT_RTOL = 1e-12


@dataclass(frozen=True)
class BipartiteShape:
    """Factorization ``H_X (x) H_Y`` with ``dim_x = k`` and ``dim_y = l``."""

    dim_x: int
    dim_y: int

    def __post_init__(self):
        if self.dim_x < 1 or self.dim_y < 1:
            raise ShapeError(f"subsystem dimensions must be positive, got {self}")

    @property
    def dim(self) -> int:
        return self.dim_x * self.dim_y


def basis_state(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; entry ``i * len(b) + j`` is ``a[i] * b[j]``."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def outer_product(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def _check_bipartite(rho: np.ndarray, shape: BipartiteShape) -> None:
    if rho.ndim != 2 or rho.shape != (shape.dim, shape.dim):
        raise ShapeError(
            f"operator of shape {rho.shape} does not match bipartite dims "
            f"({shape.dim_x}, {shape.dim_y})"
        )


def partial_trace_out_x(rho: np.ndarray, shape: BipartiteShape) -> np.ndarray:
    """Reduced state on Y: ``out[a, b] = sum_i rho[(i, a), (i, b)]``."""
    rho = np.asarray(rho)
    _check_bipartite(rho, shape)
    k, l = shape.dim_x, shape.dim_y
    return np.einsum("iaib->ab", rho.reshape(k, l, k, l))


def project_and_renormalize(rho: np.ndarray, projector: np.ndarray) -> np.ndarray:
    """Return ``P rho P / Tr[P rho P]``.

    Raises ZeroSupportError when the projected trace is at most ``1e-12``
    times the trace of ``rho``.
    """
    rho = np.asarray(rho, dtype=complex)
    projector = np.asarray(projector, dtype=complex)
    if rho.shape != projector.shape or rho.ndim != 2:
        raise ShapeError(f"projector {projector.shape} vs state {rho.shape}")
    projected = projector @ rho @ projector
    support = float(np.trace(projected).real)
    if support <= SUPPORT_RTOL * float(np.trace(rho).real):
        raise ZeroSupportError(support)
    return projected / support


def purity(rho: np.ndarray) -> float:
    """``Tr[rho^2]``, computed without forming the square."""
    rho = np.asarray(rho)
    return float(np.vdot(rho.conj().T, rho).real)


@dataclass(frozen=True)
class DensityReport:
    hermitian_defect: float
    trace_defect: float
    min_eigenvalue: float

    @property
    def ok(self) -> bool:
        return (
            self.hermitian_defect <= HERMITIAN_TOL
            and self.trace_defect <= TRACE_TOL
            and self.min_eigenvalue >= PSD_TOL
        )

    def __bool__(self) -> bool:
        return self.ok


def validate_density(rho: np.ndarray) -> DensityReport:
    """Measure how far ``rho`` is from a valid density matrix.

    Never raises on numerical defects; callers inspect the report.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ShapeError(f"density matrix must be square, got {rho.shape}")
    herm = float(np.max(np.abs(rho - rho.conj().T))) if rho.size else 0.0
    trace_defect = abs(complex(np.trace(rho)) - 1.0)
    # eigvalsh only reads one triangle, so symmetrize before asking for eigenvalues
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    return DensityReport(herm, trace_defect, min_eig)
