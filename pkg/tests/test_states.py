import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmc.errors import ShapeError, ZeroSupportError
from qmc.states import (
    BipartiteShape,
    basis_state,
    outer_product,
    partial_trace_out_x,
    project_and_renormalize,
    tensor_product,
    validate_density,
)

S = 1 / math.sqrt(2)


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(rng, dim, rank=None):
    a = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def partial_trace_loops(rho, k, l):
    """Index-summation reference for Tr_X."""
    out = np.zeros((l, l), dtype=complex)
    for a in range(l):
        for b in range(l):
            for i in range(k):
                out[a, b] += rho[i * l + a, i * l + b]
    return out


seeds = st.integers(0, 2**32 - 1)


class TestTensorProduct:
    def test_basis(self):
        np.testing.assert_array_equal(tensor_product(basis_state(0, 2), basis_state(1, 2)), basis_state(1, 4))

    def test_distributes(self):
        plus = np.array([S, S])
        np.testing.assert_allclose(tensor_product(plus, basis_state(0, 2)), [S, 0, S, 0], atol=1e-15)

    def test_norm(self):
        rng = np.random.default_rng(1)
        out = tensor_product(random_state(rng, 3), random_state(rng, 5))
        assert out.shape == (15,)
        assert abs(np.linalg.norm(out) - 1) < 1e-12

    @given(seeds)
    def test_associative(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = random_state(rng, 2), random_state(rng, 3), random_state(rng, 4)
        np.testing.assert_allclose(
            tensor_product(tensor_product(a, b), c), tensor_product(a, tensor_product(b, c)), atol=1e-12
        )


class TestOuterProduct:
    def test_basis_projector(self):
        np.testing.assert_array_equal(outer_product(basis_state(0, 2)), [[1, 0], [0, 0]])

    def test_plus_state(self):
        np.testing.assert_allclose(outer_product([S, S]), np.full((2, 2), 0.5), atol=1e-15)

    @given(seeds)
    def test_trace_one(self, seed):
        v = random_state(np.random.default_rng(seed), 6)
        assert abs(np.trace(outer_product(v)) - 1) < 1e-12


class TestPartialTrace:
    def test_product_state(self):
        rng = np.random.default_rng(2)
        a, b = random_state(rng, 3), random_state(rng, 2)
        out = partial_trace_out_x(np.kron(outer_product(a), outer_product(b)), BipartiteShape(3, 2))
        np.testing.assert_allclose(out, outer_product(b), atol=1e-14)

    def test_bell_state(self):
        bell = np.array([S, 0, 0, S])
        out = partial_trace_out_x(outer_product(bell), BipartiteShape(2, 2))
        np.testing.assert_allclose(out, np.eye(2) / 2, atol=1e-15)

    def test_matches_index_loops(self):
        rho = random_density(np.random.default_rng(3), 6)
        np.testing.assert_allclose(
            partial_trace_out_x(rho, BipartiteShape(3, 2)), partial_trace_loops(rho, 3, 2), atol=1e-12
        )

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            partial_trace_out_x(np.eye(6) / 6, BipartiteShape(2, 2))

    @given(seeds, st.integers(1, 4), st.integers(1, 4))
    def test_product_reduction_property(self, seed, k, l):
        rng = np.random.default_rng(seed)
        a, b = random_state(rng, k), random_state(rng, l)
        out = partial_trace_out_x(outer_product(tensor_product(a, b)), BipartiteShape(k, l))
        np.testing.assert_allclose(out, outer_product(b), atol=1e-12)

    @given(seeds, st.integers(1, 4), st.integers(1, 4))
    def test_trace_preserved(self, seed, k, l):
        rho = random_density(np.random.default_rng(seed), k * l)
        assert abs(np.trace(partial_trace_out_x(rho, BipartiteShape(k, l))) - np.trace(rho)) < 1e-12


class TestProjection:
    P0 = np.kron(np.diag([1.0, 0.0]), np.eye(2))
    P1 = np.kron(np.diag([0.0, 1.0]), np.eye(2))

    def test_contained(self):
        rho = outer_product(basis_state(0, 4))
        np.testing.assert_allclose(project_and_renormalize(rho, self.P0), rho, atol=1e-15)

    def test_orthogonal(self):
        with pytest.raises(ZeroSupportError):
            project_and_renormalize(outer_product(basis_state(0, 4)), self.P1)

    def test_mixture(self):
        rho = 0.5 * outer_product(basis_state(0, 4)) + 0.5 * outer_product(basis_state(3, 4))
        # P0 rho P0 = 0.5 |00><00|, trace 0.5
        np.testing.assert_allclose(
            project_and_renormalize(rho, self.P0), outer_product(basis_state(0, 4)), atol=1e-15
        )

    @given(seeds)
    @settings(max_examples=50)
    def test_output_valid_and_idempotent(self, seed):
        rng = np.random.default_rng(seed)
        rho = random_density(rng, 6)
        psi = random_state(rng, 3)
        P = np.kron(outer_product(psi), np.eye(2))
        once = project_and_renormalize(rho, P)
        assert validate_density(once).ok
        np.testing.assert_allclose(project_and_renormalize(once, P), once, atol=1e-10)


class TestValidateDensity:
    def test_maximally_mixed(self):
        assert validate_density(np.eye(2) / 2).ok

    def test_bad_trace(self):
        report = validate_density(np.diag([1.0, 0.1]))
        assert not report.ok
        assert report.trace_defect == pytest.approx(0.1)

    def test_negative_eigenvalue(self):
        report = validate_density(np.array([[0.5, 0.6], [0.6, 0.5]]))
        assert not report.ok
        assert report.min_eigenvalue == pytest.approx(-0.1)

    def test_non_hermitian(self):
        report = validate_density(np.array([[0.5, 0.1], [0.0, 0.5]]))
        assert report.hermitian_defect == pytest.approx(0.1)
        assert not report
