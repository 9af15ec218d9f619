"""Fast adjoint/forward Haar transforms, dense oracles, and Haar convolution.

The adjoint transform aggregates the signal bottom-up into per-level
weighted sums S_j, then takes one sparse dot per band:

    (Phi^T f)_l = sum_k S_j(f, v_k) * w_k^(j) * phi_l^(j)(v_k),  j = band of l.

The forward transform evaluates per-band combinations s(c, v) at each level
and pushes them down with cumulative ancestor weights:

    (Phi c)_k = sum_j W_k^(j) * s(c, ancestor_j(k)).

Both are pure functions over precomputed (basis, chain, weights); the dense
paths multiply the materialized N x N matrix and serve as oracles and as the
direct-product baseline in benchmarks.
"""

from __future__ import annotations

import numpy as np

from .basis import HaarBasis
from .chain import CoarseChain, finest_ancestors
from .errors import ValidationError


def check_pair(basis: HaarBasis, chain: CoarseChain) -> None:
    """Raise if the basis was not built from (an identically-shaped) chain."""
    if basis.n != chain.n or basis.num_bands != chain.num_levels or not np.array_equal(
        basis.band_offsets, np.asarray(chain.level_sizes)
    ):
        raise ValidationError(
            "basis/chain mismatch: band offsets "
            f"{list(basis.band_offsets)} vs level sizes {chain.level_sizes}"
        )


def _check_length(vec: np.ndarray, n: int, what: str) -> np.ndarray:
    vec = np.asarray(vec, dtype=np.float64)
    if vec.ndim != 1 or len(vec) != n:
        raise ValidationError(f"{what} must be a length-{n} vector, got shape {vec.shape}")
    return vec


def weighted_sums(f: np.ndarray, chain: CoarseChain) -> list[np.ndarray]:
    """Per-level weighted sums, finest to coarsest in one O(N) sweep.

    S[last] = f; S[i][v] = sum over children v' of w^(i+1)_{v'} S[i+1][v'].
    """
    f = _check_length(f, chain.n, "signal")
    num = chain.num_levels
    sums: list[np.ndarray] = [np.empty(0)] * num
    sums[num - 1] = f
    for i in range(num - 2, -1, -1):
        child = chain.levels[i + 1]
        sums[i] = np.bincount(
            child.parent, weights=child.weight_factor * sums[i + 1], minlength=chain.levels[i].n
        )
    return sums


def adjoint_fht(f: np.ndarray, basis: HaarBasis, chain: CoarseChain) -> np.ndarray:
    """Fast adjoint Haar transform Phi^T f."""
    check_pair(basis, chain)
    sums = weighted_sums(f, chain)
    out = np.empty(chain.n, dtype=np.float64)
    lo = 0
    for i in range(chain.num_levels):
        hi = int(basis.band_offsets[i])
        out[lo:hi] = basis.band_transposed(i) @ (sums[i] * chain.levels[i].weight_factor)
        lo = hi
    return out


def forward_fht(
    c: np.ndarray, basis: HaarBasis, chain: CoarseChain, cw: np.ndarray
) -> np.ndarray:
    """Fast forward Haar transform Phi c using the cumulative weight table."""
    check_pair(basis, chain)
    c = _check_length(c, chain.n, "coefficient vector")
    if cw.shape != (chain.n, chain.num_levels):
        raise ValidationError(
            f"cumulative weight table shape {cw.shape} != {(chain.n, chain.num_levels)}"
        )
    anc = finest_ancestors(chain)
    out = np.zeros(chain.n, dtype=np.float64)
    lo = 0
    for i in range(chain.num_levels):
        hi = int(basis.band_offsets[i])
        s_i = basis.band_transposed(i).T @ c[lo:hi]
        out += cw[:, i] * s_i[anc[i]]
        lo = hi
    return out


def dense_adjoint(f: np.ndarray, basis: HaarBasis) -> np.ndarray:
    """Oracle/baseline: direct matrix product over the materialized basis."""
    f = _check_length(f, basis.n, "signal")
    return basis.dense().T @ f


def dense_forward(c: np.ndarray, basis: HaarBasis) -> np.ndarray:
    c = _check_length(c, basis.n, "coefficient vector")
    return basis.dense() @ c


def haar_convolution(
    g: np.ndarray, f: np.ndarray, basis: HaarBasis, chain: CoarseChain, cw: np.ndarray
) -> np.ndarray:
    """g * f = Phi((Phi^T g) . (Phi^T f)), elementwise product of coefficients."""
    gh = adjoint_fht(g, basis, chain)
    fh = adjoint_fht(f, basis, chain)
    return forward_fht(gh * fh, basis, chain, cw)


def spectral_filter_apply(
    ghat: np.ndarray, f: np.ndarray, basis: HaarBasis, chain: CoarseChain, cw: np.ndarray
) -> np.ndarray:
    """Apply a filter already given in the coefficient domain: Phi(ghat . Phi^T f)."""
    ghat = _check_length(ghat, basis.n, "frequency filter")
    return forward_fht(ghat * adjoint_fht(f, basis, chain), basis, chain, cw)


def adjoint_fht_matrix(mat: np.ndarray, basis: HaarBasis, chain: CoarseChain) -> np.ndarray:
    """Column-by-column adjoint transform of an (N, d) feature matrix."""
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != chain.n:
        raise ValidationError(f"feature matrix must have {chain.n} rows, got shape {mat.shape}")
    out = np.empty_like(mat)
    for col in range(mat.shape[1]):
        out[:, col] = adjoint_fht(mat[:, col], basis, chain)
    return out


def forward_fht_matrix(
    mat: np.ndarray, basis: HaarBasis, chain: CoarseChain, cw: np.ndarray
) -> np.ndarray:
    """Column-by-column forward transform of an (N, d) coefficient matrix."""
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != chain.n:
        raise ValidationError(f"coefficient matrix must have {chain.n} rows, got shape {mat.shape}")
    out = np.empty_like(mat)
    for col in range(mat.shape[1]):
        out[:, col] = forward_fht(mat[:, col], basis, chain, cw)
    return out
