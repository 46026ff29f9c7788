"""Dense linear-algebra kernels, matrix norms and shrinkage operators.

Matrices are plain ``numpy.ndarray`` objects of shape ``(m, n)``. Throughout
the package each *column* of a data matrix is one observation.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import as_matrix, check_threshold
from .exceptions import UsageError

NORM_KINDS = ("nuclear", "l1", "l21", "fro", "l0", "l20", "spectral")

# relative zero level for l0 / l20 counting
ZERO_RTOL = 1e-6


@dataclass(frozen=True)
class SkinnySvd:
    """Thin SVD keeping only the numerically nonzero singular values.

    ``U`` is m x r, ``sigma`` has length r (non-increasing, all positive) and
    ``V`` is n x r, so that ``M = U @ diag(sigma) @ V.T``.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    @property
    def rank(self):
        return self.sigma.shape[0]

    @property
    def shape(self):
        return (self.U.shape[0], self.V.shape[0])

    def reconstruct(self):
        return (self.U * self.sigma) @ self.V.T


def rank_tolerance(sigma, shape):
    """Singular values at or below this level count as zero."""
    if sigma.size == 0:
        return 0.0
    return max(shape) * np.finfo(np.float64).eps * sigma[0]


def skinny_svd(M):
    """Skinny SVD of ``M`` with numerical-rank truncation.

    A singular value is dropped when it does not exceed
    ``max(m, n) * eps * sigma_1``.
    """
    M = as_matrix(M)
    m, n = M.shape
    if M.size == 0 or not np.any(M):
        return SkinnySvd(np.zeros((m, 0)), np.zeros(0), np.zeros((n, 0)))
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    r = int(np.count_nonzero(s > rank_tolerance(s, M.shape)))
    return SkinnySvd(U[:, :r], s[:r], Vt[:r].T)


def numerical_rank(M, atol=0.0):
    """Number of singular values above both the default rank floor and ``atol``."""
    svd = skinny_svd(M)
    return int(np.count_nonzero(svd.sigma > atol))


def pseudo_inverse(M):
    """Moore-Penrose pseudo-inverse ``V diag(1/sigma) U^T``."""
    svd = skinny_svd(M)
    return (svd.V / svd.sigma) @ svd.U.T


def lq_decompose(M):
    """LQ factorisation ``M = L @ V.T``.

    ``L`` is lower triangular with a non-negative diagonal and ``V`` has
    orthonormal columns. Computed as the QR factorisation of ``M.T``.
    """
    M = as_matrix(M)
    Q, R = np.linalg.qr(M.T, mode="reduced")
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    R = R * signs[:, None]
    Q = Q * signs[None, :]
    return R.T, Q


def zero_tolerance(M):
    """Absolute level below which an entry (or column norm) counts as zero."""
    M = np.asarray(M, dtype=np.float64)
    if M.size == 0:
        return 0.0
    return ZERO_RTOL * np.linalg.norm(M) / np.sqrt(M.size)


def nonzero_columns(M):
    """Sorted indices of the columns of ``M`` whose norm exceeds the zero level."""
    M = np.asarray(M, dtype=np.float64)
    col_norms = np.linalg.norm(M, axis=0)
    return np.flatnonzero(col_norms > zero_tolerance(M))


def norm(M, kind):
    """Matrix norm or counting function.

    ``kind`` is one of ``nuclear``, ``l1`` (sum of absolute entries), ``l21``
    (sum of column norms), ``fro``, ``l0`` (nonzero entries), ``l20``
    (nonzero columns) or ``spectral``.
    """
    if kind not in NORM_KINDS:
        raise UsageError(f"unknown norm kind {kind!r}; expected one of {NORM_KINDS}")
    M = as_matrix(M)
    if kind == "nuclear":
        return float(np.sum(skinny_svd(M).sigma))
    if kind == "l1":
        return float(np.abs(M).sum())
    if kind == "l21":
        return float(np.linalg.norm(M, axis=0).sum())
    if kind == "fro":
        return float(np.linalg.norm(M))
    if kind == "spectral":
        return float(np.linalg.norm(M, 2)) if M.size else 0.0
    if kind == "l0":
        return int(np.count_nonzero(np.abs(M) > zero_tolerance(M)))
    return int(nonzero_columns(M).size)


def svt(M, tau):
    """Singular value thresholding, the proximal map of ``tau * ||.||_*``."""
    tau = check_threshold(tau)
    M = as_matrix(M)
    return _svt(M, tau)[0]


def _svt(M, tau):
    # returns (shrunk matrix, its skinny factors)
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    floor = rank_tolerance(s, M.shape)
    s = s - tau
    r = int(np.count_nonzero(s > floor))
    svd = SkinnySvd(U[:, :r], s[:r], Vt[:r].T)
    return svd.reconstruct(), svd


def soft_threshold(M, tau):
    """Entrywise shrinkage ``sign(x) * max(|x| - tau, 0)``."""
    tau = check_threshold(tau)
    M = as_matrix(M)
    return np.sign(M) * np.maximum(np.abs(M) - tau, 0.0)


def column_shrink(M, tau):
    """Column-wise shrinkage, the proximal map of ``tau * ||.||_{2,1}``.

    Each column ``c`` becomes ``c * max(||c|| - tau, 0) / ||c||``.
    """
    tau = check_threshold(tau)
    M = as_matrix(M)
    col_norms = np.linalg.norm(M, axis=0)
    keep = col_norms > tau
    scale = np.zeros_like(col_norms)
    scale[keep] = 1.0 - tau / col_norms[keep]
    return M * scale
