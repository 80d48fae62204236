"""Symmetric eigendecomposition and the graph Fourier transform.

The Fourier basis is the eigenvector matrix U of the normalized Laplacian;
the forward transform is U^T applied along the node axis.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-10
JACOBI_OFFDIAG_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class SpectralBasis:
    """Eigenvalues (ascending) and orthonormal eigenvectors, column k per pair.

    The sign of each eigenvector is fixed so that its first component with
    absolute value above 1e-10 is positive, making the basis deterministic
    for simple spectra.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def basis_id(self) -> str:
        h = hashlib.sha256()
        h.update(self.eigenvalues.tobytes())
        h.update(self.eigenvectors.tobytes())
        return h.hexdigest()[:16]

    def adjacency_eigenvalues(self) -> np.ndarray:
        """Spectrum of A_sym when this basis diagonalizes L_sym: mu = 1 - lambda."""
        return 1.0 - self.eigenvalues


def _jacobi_rotate(a, v, p, q):
    app, aqq, apq = a[p, p], a[q, q], a[p, q]
    # stable computation of the rotation angle
    theta = 0.5 * (aqq - app) / apq
    t = np.sign(theta) / (abs(theta) + np.sqrt(1.0 + theta * theta))
    if theta == 0.0:
        t = 1.0
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c

    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q

    vp = v[:, p].copy()
    v[:, p] = c * vp - s * v[:, q]
    v[:, q] = s * vp + c * v[:, q]


def _offdiag_norm(a):
    off = a - np.diag(np.diag(a))
    return np.sqrt(np.sum(off * off))


def eigendecompose_symmetric(m: np.ndarray) -> SpectralBasis:
    """Full eigendecomposition of a symmetric matrix via cyclic Jacobi sweeps.

    Sweeps rotate away every off-diagonal pair in row order until the
    off-diagonal Frobenius norm drops below 1e-12 (relative to the input
    scale) or the sweep budget runs out.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("input must be a square matrix")
    if np.max(np.abs(m - m.T)) > SYMMETRY_TOL:
        raise ValueError("input matrix is not symmetric within 1e-10")

    n = m.shape[0]
    a = 0.5 * (m + m.T)
    v = np.eye(n)
    scale = max(1.0, float(np.sqrt(np.sum(a * a))))
    threshold = JACOBI_OFFDIAG_TOL * scale

    for _ in range(JACOBI_MAX_SWEEPS):
        if _offdiag_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > threshold / (n * n):
                    _jacobi_rotate(a, v, p, q)
    if _offdiag_norm(a) > threshold:
        raise RuntimeError(
            f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = v[:, order]
    for k in range(n):
        col = vectors[:, k]
        lead = np.nonzero(np.abs(col) > 1e-10)[0]
        if len(lead) and col[lead[0]] < 0:
            vectors[:, k] = -col
    return SpectralBasis(eigenvalues, vectors)


def _check_signal(basis: SpectralBasis, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] != basis.n:
        raise ValueError(
            f"signal has {x.shape[0]} nodes, basis has {basis.n}"
        )
    return x


def graph_fourier(basis: SpectralBasis, x: np.ndarray) -> np.ndarray:
    """Project a (multi-channel) node signal onto the eigenbasis: U^T X."""
    return basis.eigenvectors.T @ _check_signal(basis, x)


def inverse_fourier(basis: SpectralBasis, x_hat: np.ndarray) -> np.ndarray:
    """Reconstruct a node signal from spectral coefficients: U X_hat."""
    return basis.eigenvectors @ _check_signal(basis, x_hat)


def rank_one_graph(basis: SpectralBasis, k: int) -> np.ndarray:
    """Spectral projector U_{:,k} U_{:,k}^T onto component k (0-indexed)."""
    if not 0 <= k < basis.n:
        raise IndexError(f"component index {k} out of range [0, {basis.n})")
    u = basis.eigenvectors[:, k]
    return np.outer(u, u)


def min_eigengap(basis: SpectralBasis) -> float:
    """Smallest gap between consecutive eigenvalues; 0 marks a degenerate spectrum."""
    if basis.n < 2:
        return np.inf
    return float(np.min(np.diff(basis.eigenvalues)))
