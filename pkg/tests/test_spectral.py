"""Jacobi eigendecomposition against the dense-solver oracle, Fourier transform."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gclab.graph import generate_erdos_renyi, laplacian
from gclab.spectral import (
    eigendecompose_symmetric,
    graph_fourier,
    inverse_fourier,
    min_eigengap,
    rank_one_graph,
)


def random_symmetric(n, seed):
    m = np.random.default_rng(seed).standard_normal((n, n))
    return 0.5 * (m + m.T)


class TestEigendecomposition:
    def test_matches_dense_solver_oracle(self):
        for seed in range(5):
            m = random_symmetric(7, seed)
            basis = eigendecompose_symmetric(m)
            np.testing.assert_allclose(
                basis.eigenvalues, np.linalg.eigvalsh(m), atol=1e-10
            )

    def test_reconstruction_and_orthonormality(self):
        m = laplacian(generate_erdos_renyi(12, 0.3, seed=2))
        basis = eigendecompose_symmetric(m)
        u, lam = basis.eigenvectors, basis.eigenvalues
        np.testing.assert_allclose(u.T @ u, np.eye(12), atol=1e-12)
        np.testing.assert_allclose(u @ np.diag(lam) @ u.T, m, atol=1e-12)

    def test_eigenvalues_ascending(self):
        basis = eigendecompose_symmetric(random_symmetric(9, 3))
        assert np.all(np.diff(basis.eigenvalues) >= 0)

    def test_sign_convention_first_large_entry_positive(self):
        basis = eigendecompose_symmetric(random_symmetric(6, 4))
        for k in range(6):
            col = basis.eigenvectors[:, k]
            lead = np.nonzero(np.abs(col) > 1e-10)[0]
            assert col[lead[0]] > 0

    def test_two_node_laplacian_known_values(self):
        # L_sym of a single edge: eigenpairs (0, [1,1]/sqrt2), (2, [1,-1]/sqrt2)
        m = np.array([[1.0, -1.0], [-1.0, 1.0]])
        basis = eigendecompose_symmetric(m)
        np.testing.assert_allclose(basis.eigenvalues, [0.0, 2.0], atol=1e-12)
        s = 1 / np.sqrt(2)
        np.testing.assert_allclose(
            basis.eigenvectors, [[s, s], [s, -s]], atol=1e-12
        )

    def test_diagonal_matrix_is_immediate(self):
        basis = eigendecompose_symmetric(np.diag([3.0, -1.0, 2.0]))
        np.testing.assert_allclose(basis.eigenvalues, [-1.0, 2.0, 3.0])

    def test_one_by_one(self):
        basis = eigendecompose_symmetric(np.array([[5.0]]))
        np.testing.assert_allclose(basis.eigenvalues, [5.0])
        assert min_eigengap(basis) == np.inf

    def test_rejects_nonsymmetric(self):
        with pytest.raises(ValueError, match="not symmetric"):
            eigendecompose_symmetric(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError, match="square"):
            eigendecompose_symmetric(np.zeros((2, 3)))

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10**6), n=st.integers(2, 10))
    def test_property_reconstruction(self, seed, n):
        m = random_symmetric(n, seed)
        basis = eigendecompose_symmetric(m)
        u = basis.eigenvectors
        np.testing.assert_allclose(
            u @ np.diag(basis.eigenvalues) @ u.T, m, atol=1e-10
        )


class TestBasisProperties:
    def test_basis_id_stable_and_distinct(self):
        m1 = laplacian(generate_erdos_renyi(8, 0.4, seed=0))
        m2 = laplacian(generate_erdos_renyi(8, 0.4, seed=1))
        assert (
            eigendecompose_symmetric(m1).basis_id
            == eigendecompose_symmetric(m1).basis_id
        )
        assert (
            eigendecompose_symmetric(m1).basis_id
            != eigendecompose_symmetric(m2).basis_id
        )

    def test_adjacency_eigenvalues_are_one_minus_lambda(self):
        from gclab.graph import normalized_adjacency

        g = generate_erdos_renyi(9, 0.4, seed=7)
        basis = eigendecompose_symmetric(laplacian(g))
        mu = basis.adjacency_eigenvalues()
        # the same U diagonalizes A_sym with eigenvalue 1 - lambda
        np.testing.assert_allclose(
            normalized_adjacency(g) @ basis.eigenvectors,
            basis.eigenvectors * mu,
            atol=1e-10,
        )

    def test_min_eigengap(self):
        basis = eigendecompose_symmetric(np.diag([0.0, 0.5, 2.0]))
        assert np.isclose(min_eigengap(basis), 0.5)


class TestFourier:
    def test_roundtrip(self):
        basis = eigendecompose_symmetric(random_symmetric(8, 5))
        x = np.random.default_rng(0).standard_normal((8, 3))
        np.testing.assert_allclose(
            inverse_fourier(basis, graph_fourier(basis, x)), x, atol=1e-12
        )

    def test_vector_signal_promoted_to_column(self):
        basis = eigendecompose_symmetric(random_symmetric(5, 6))
        x = np.arange(5.0)
        assert graph_fourier(basis, x).shape == (5, 1)

    def test_constant_signal_concentrates_on_null_component(self):
        g = generate_erdos_renyi(10, 0.5, seed=9)
        basis = eigendecompose_symmetric(laplacian(g))
        # D^{1/2} 1 is the lambda=0 eigenvector direction
        x = np.sqrt(g.degrees)
        x_hat = graph_fourier(basis, x).ravel()
        assert np.abs(x_hat[0]) > 1.0
        np.testing.assert_allclose(x_hat[1:], 0.0, atol=1e-10)

    def test_shape_mismatch_error(self):
        basis = eigendecompose_symmetric(random_symmetric(5, 6))
        with pytest.raises(ValueError, match="nodes"):
            graph_fourier(basis, np.zeros((4, 2)))

    def test_rank_one_graphs_are_projectors_summing_to_identity(self):
        basis = eigendecompose_symmetric(random_symmetric(6, 8))
        total = np.zeros((6, 6))
        for k in range(6):
            p = rank_one_graph(basis, k)
            np.testing.assert_allclose(p @ p, p, atol=1e-12)
            total += p
        np.testing.assert_allclose(total, np.eye(6), atol=1e-12)

    def test_rank_one_index_error(self):
        basis = eigendecompose_symmetric(random_symmetric(4, 8))
        with pytest.raises(IndexError):
            rank_one_graph(basis, 4)
