"""Exact SISO and MIMO graph convolutions and spectral-response analysis.

The MIMO convolution of a filter tensor with a multi-channel signal is
computed as a sum of rank-one spectral projectors, sum_k A^(k) X W^(k).
Several independent routes to the same value (channel-pair SISO sums, the
per-node pairwise form, and a vectorized block-diagonal form) are kept as
oracles for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import SpectralBasis, graph_fourier, inverse_fourier

UNIVERSALITY_MIN_COMPONENT = 1e-9


@dataclass(frozen=True)
class FilterTensor:
    """General MIMO filter: values[i, q, p] maps input channel p to output q.

    Shape is (n, c, d). The tensor is tied to the spectral basis it was
    built against via basis_id; mixing bases silently changes the meaning
    of every entry, so operations check the id.
    """

    values: np.ndarray
    basis_id: str

    def __post_init__(self):
        if self.values.ndim != 3:
            raise ValueError("filter tensor must have shape (n, c, d)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("filter tensor has non-finite entries")

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def c(self):
        return self.values.shape[1]

    @property
    def d(self):
        return self.values.shape[2]


@dataclass(frozen=True)
class WeightStack:
    """Ordered list of per-component weight matrices W^(k), each d x c."""

    matrices: np.ndarray  # (count, d, c)

    def __post_init__(self):
        if self.matrices.ndim != 3:
            raise ValueError("weight stack must have shape (count, d, c)")

    @property
    def count(self):
        return self.matrices.shape[0]

    @property
    def d(self):
        return self.matrices.shape[1]

    @property
    def c(self):
        return self.matrices.shape[2]


@dataclass(frozen=True)
class SpectralResponse:
    """Per-component filter response sampled at the basis eigenvalues."""

    eigenvalues: np.ndarray
    response: np.ndarray

    def dominance_ratio(self) -> float:
        """|largest| / |second largest| absolute response; inf when n == 1."""
        mags = np.sort(np.abs(self.response))[::-1]
        if len(mags) < 2:
            return np.inf
        if mags[1] == 0.0:
            return np.inf
        return float(mags[0] / mags[1])


def _check_basis(theta: FilterTensor, basis: SpectralBasis):
    if theta.basis_id != basis.basis_id:
        raise ValueError("filter tensor was built against a different basis")


def _check_channels(x: np.ndarray, d: int):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[1] != d:
        raise ValueError(f"signal has {x.shape[1]} channels, filter expects {d}")
    return x


def siso_gc(theta: np.ndarray, x: np.ndarray, basis: SpectralBasis) -> np.ndarray:
    """Single-channel convolution U diag(U^T theta) U^T x."""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    x = np.asarray(x, dtype=float).reshape(-1)
    if len(theta) != basis.n or len(x) != basis.n:
        raise ValueError("theta and x must both have length n")
    u = basis.eigenvectors
    return u @ ((u.T @ theta) * (u.T @ x))


def weight_stack_from_filter(theta: FilterTensor, basis: SpectralBasis) -> WeightStack:
    """Fourier-transform the filter along the node axis: W^(k) = (F(theta)_k)^T."""
    _check_basis(theta, basis)
    # mode-1 product U^T x_1 theta, one c x d slab per spectral component
    hat = np.einsum("ik,icd->kcd", basis.eigenvectors, theta.values)
    return WeightStack(np.transpose(hat, (0, 2, 1)).copy())


def filter_from_weight_stack(stack: WeightStack, basis: SpectralBasis) -> FilterTensor:
    """Inverse of weight_stack_from_filter; stack must hold n matrices."""
    if stack.count != basis.n:
        raise ValueError("stack must hold one matrix per spectral component")
    hat = np.transpose(stack.matrices, (0, 2, 1))
    values = np.einsum("ik,kcd->icd", basis.eigenvectors, hat)
    return FilterTensor(values, basis.basis_id)


def mimo_gc(theta: FilterTensor, x: np.ndarray, basis: SpectralBasis) -> np.ndarray:
    """Exact MIMO convolution: sum_k U_{:,k} (U_{:,k}^T X) W^(k)."""
    _check_basis(theta, basis)
    x = _check_channels(x, theta.d)
    stack = weight_stack_from_filter(theta, basis)
    return mimo_gc_from_stack(stack, x, basis)


def mimo_gc_from_stack(stack: WeightStack, x: np.ndarray, basis: SpectralBasis) -> np.ndarray:
    """Convolution given the spectral weight stack directly."""
    if stack.count != basis.n:
        raise ValueError("stack must hold one matrix per spectral component")
    x = _check_channels(x, stack.d)
    u = basis.eigenvectors
    out = np.zeros((basis.n, stack.c))
    # fixed ascending-k reduction keeps results bit-stable
    for k in range(basis.n):
        out += np.outer(u[:, k], (u[:, k] @ x) @ stack.matrices[k])
    return out


def mimo_gc_oracle(theta: FilterTensor, x: np.ndarray, basis: SpectralBasis) -> np.ndarray:
    """Channel-pair route: output channel q = sum_p siso_gc(theta[:, q, p], x[:, p])."""
    _check_basis(theta, basis)
    x = _check_channels(x, theta.d)
    out = np.zeros((theta.n, theta.c))
    for q in range(theta.c):
        for p in range(theta.d):
            out[:, q] += siso_gc(theta.values[:, q, p], x[:, p], basis)
    return out


def mimo_gc_vectorized_oracle(theta: FilterTensor, x: np.ndarray, basis: SpectralBasis) -> np.ndarray:
    """Kronecker route: (I_c kron U) D (I_d kron U^T) vec(X) with D block-diagonal.

    D interleaves the Fourier-domain filter entries so that block (q, p)
    is diag over spectral components of F(theta)[:, q, p].
    """
    _check_basis(theta, basis)
    x = _check_channels(x, theta.d)
    n, c, d = theta.n, theta.c, theta.d
    hat = np.einsum("ik,icd->kcd", basis.eigenvectors, theta.values)
    big = np.zeros((n * c, n * d))
    for q in range(c):
        for p in range(d):
            big[q * n : (q + 1) * n, p * n : (p + 1) * n] = np.diag(hat[:, q, p])
    left = np.kron(np.eye(c), basis.eigenvectors)
    right = np.kron(np.eye(d), basis.eigenvectors.T)
    vec = left @ (big @ (right @ x.reshape(-1, order="F")))
    return vec.reshape((n, c), order="F")


def pairwise_weight(stack: WeightStack, basis: SpectralBasis, i: int, j: int) -> np.ndarray:
    """Per-node-pair transform W_(i,j) = (sum_k U_ik U_jk W^(k))^T, shape c x d."""
    if stack.count != basis.n:
        raise ValueError("stack must hold one matrix per spectral component")
    if not (0 <= i < basis.n and 0 <= j < basis.n):
        raise IndexError(f"node pair ({i},{j}) out of range for n={basis.n}")
    u = basis.eigenvectors
    coeff = u[i, :] * u[j, :]
    return np.einsum("k,kdc->cd", coeff, stack.matrices)


def mimo_gc_pairwise(stack: WeightStack, x: np.ndarray, basis: SpectralBasis) -> np.ndarray:
    """Node-form evaluation: row i = sum_j W_(i,j) X_{j,:}."""
    x = _check_channels(x, stack.d)
    out = np.zeros((basis.n, stack.c))
    for i in range(basis.n):
        for j in range(basis.n):
            out[i] += pairwise_weight(stack, basis, i, j) @ x[j]
    return out


def universality_filter(x: np.ndarray, y: np.ndarray, basis: SpectralBasis) -> FilterTensor:
    """Construct a filter mapping x exactly to y.

    Requires every spectral component of x to be non-zero; with
    a^(k) = U_{:,k}^T X and b^(k) = U_{:,k}^T Y the weights are
    W^(k)[m, q] = b^(k)[q] / (d * a^(k)[m]), which makes each component
    of the output match y's component exactly.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = graph_fourier(basis, x)  # (n, d)
    b = graph_fourier(basis, y)  # (n, c)
    if np.min(np.abs(a)) <= UNIVERSALITY_MIN_COMPONENT:
        raise ValueError(
            "universality precondition violated: input has a near-zero "
            "spectral component"
        )
    d = a.shape[1]
    # W^(k) = (1/d) (1/a^(k))^T b^(k), outer product per component
    mats = (1.0 / a)[:, :, None] * b[:, None, :] / d  # (n, d, c)
    return filter_from_weight_stack(WeightStack(mats), basis)


def mimo_polynomial(a_sym: np.ndarray, x: np.ndarray, v_list) -> np.ndarray:
    """Polynomial filter sum_{k=0}^K A_sym^k X V^(k)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((x.shape[0], np.asarray(v_list[0]).shape[1]))
    power_x = x.copy()
    for v in v_list:
        out += power_x @ np.asarray(v, dtype=float)
        power_x = a_sym @ power_x
    return out


def polynomial_as_mimo_filter(v_list, basis: SpectralBasis) -> WeightStack:
    """Spectral stack of the polynomial filter: W^(j) = sum_k mu_j^k V^(k).

    mu_j are eigenvalues of A_sym, i.e. 1 - lambda_j of L_sym; the
    conversion is centralized here to keep the two spectra straight.
    """
    mu = basis.adjacency_eigenvalues()
    v = np.stack([np.asarray(m, dtype=float) for m in v_list])  # (K+1, d, c)
    powers = mu[:, None] ** np.arange(len(v_list))[None, :]  # (n, K+1)
    return WeightStack(np.einsum("jk,kdc->jdc", powers, v))


def gcn_as_mimo_stack(v: np.ndarray, basis: SpectralBasis) -> WeightStack:
    """First-order case W^(j) = mu_j V, the spectral form of A_sym X V."""
    return polynomial_as_mimo_filter([np.zeros_like(v), v], basis)


def filter_response(stack: WeightStack, basis: SpectralBasis, in_channel: int, out_channel: int) -> SpectralResponse:
    """Response of one input/output channel pair across spectral components."""
    if stack.count != basis.n:
        raise ValueError("stack must hold one matrix per spectral component")
    if not 0 <= in_channel < stack.d:
        raise IndexError(f"input channel {in_channel} out of range")
    if not 0 <= out_channel < stack.c:
        raise IndexError(f"output channel {out_channel} out of range")
    return SpectralResponse(
        basis.eigenvalues.copy(),
        stack.matrices[:, in_channel, out_channel].copy(),
    )


def sca_repeated_gcn(weights, basis: SpectralBasis) -> SpectralResponse:
    """Composed response of k first-order filters: prod_i (w_i mu_j) per component."""
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 1 or len(weights) < 1:
        raise ValueError("need at least one filter weight")
    mu = basis.adjacency_eigenvalues()
    response = np.prod(weights) * mu ** len(weights)
    return SpectralResponse(basis.eigenvalues.copy(), response)
