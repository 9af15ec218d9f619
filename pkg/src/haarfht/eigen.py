"""Cyclic Jacobi eigensolver for dense symmetric matrices.

Used as the dense-eigenbasis timing baseline and as a self-contained
oracle. Row-cyclic sweeps rotate every off-diagonal pair whose magnitude
is at or above tol * ||m||_F; a full sweep with no rotations certifies
max |a_ij| < tol * ||m||_F (the Frobenius norm is invariant under the
rotations, so the threshold is fixed once up front). The sweep kernel is
compiled with numba; the O(N^3)-per-sweep cost is the point of the
comparison against the O(N)-ish Haar basis generation.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import NumericalCheckError, ValidationError

MAX_ORDER = 4096


@njit(cache=True)
def _sweep_kernel(a, ut, threshold, max_sweeps):  # pragma: no cover - compiled
    n = a.shape[0]
    for sweep in range(max_sweeps):
        rotations = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < threshold:
                    continue
                rotations += 1
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # J^T A: rows p and q (contiguous)
                for i in range(n):
                    api = a[p, i]
                    aqi = a[q, i]
                    a[p, i] = c * api - s * aqi
                    a[q, i] = s * api + c * aqi
                # (J^T A) J: columns p and q
                for i in range(n):
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = c * aip - s * aiq
                    a[i, q] = s * aip + c * aiq
                # analytic post-rotation pivot values kill roundoff
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                # U J kept transposed: rows of ut are columns of U (contiguous)
                for i in range(n):
                    uti = ut[p, i]
                    utq = ut[q, i]
                    ut[p, i] = c * uti - s * utq
                    ut[q, i] = s * uti + c * utq
        if rotations == 0:
            return sweep
    return -1


def jacobi_eigenbasis(
    mat: np.ndarray, tol: float = 1e-10, max_sweeps: int = 60
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.

    Raises ValidationError for non-symmetric input or order > 4096, and
    NumericalCheckError if the sweep budget is exhausted (does not happen
    for symmetric input; Jacobi converges quadratically).
    """
    a = np.array(mat, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > MAX_ORDER:
        raise ValidationError(f"order {n} exceeds the Jacobi guard ({MAX_ORDER})")
    if not np.array_equal(a, a.T):
        raise ValidationError("matrix is not symmetric")
    ut = np.eye(n)
    if n == 1:
        return np.diagonal(a).copy(), ut
    threshold = tol * np.linalg.norm(a, "fro")
    if threshold == 0.0:
        return np.zeros(n), ut

    converged = _sweep_kernel(a, ut, threshold, max_sweeps)
    if converged < 0:
        raise NumericalCheckError(f"Jacobi did not converge within {max_sweeps} sweeps")

    eigenvalues = np.diagonal(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], np.ascontiguousarray(ut[order].T)


def warm_up() -> None:
    """Trigger kernel compilation outside any timed region."""
    jacobi_eigenbasis(np.array([[2.0, 1.0], [1.0, 2.0]]))
