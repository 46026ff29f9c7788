"""Iterative solvers for relaxed robust PCA and the partial-ADM R-LRR baseline.

All solvers use the inexact augmented Lagrangian scheme with a single dual
variable ``Y`` and a geometrically increasing penalty ``mu``. Convergence is
declared on primal feasibility only: ``||X - A - E||_F / ||X||_F <= tol``.
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from ._validation import as_matrix, check_positive
from .exceptions import UsageError
from .matcore import SkinnySvd, _svt, column_shrink, soft_threshold

logger = logging.getLogger(__name__)

NOISE_NORMS = ("l1", "l21")


@dataclass
class SolverOptions:
    """Settings shared by the ADM-type solvers.

    Parameters
    ----------
    lam : float or "auto"
        Weight of the noise term. ``"auto"`` picks the recovery-theoretic
        default of the solver it is passed to.
    mu0 : float, optional
        Initial penalty. ``None`` means ``1.25 / ||X||_2``.
    rho : float
        Penalty growth factor per iteration, > 1.
    tol : float
        Relative primal feasibility tolerance.
    max_iter : int
    seed : int
        Seed for any randomized sub-step.
    """

    lam: object = "auto"
    mu0: float = None
    rho: float = 1.5
    tol: float = 1e-7
    max_iter: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not (isinstance(self.lam, str) and self.lam == "auto"):
            self.lam = check_positive(self.lam, "lam")
        if self.mu0 is not None:
            self.mu0 = check_positive(self.mu0, "mu0")
        if not float(self.rho) > 1:
            raise UsageError(f"rho must exceed 1, got {self.rho}")
        self.tol = check_positive(self.tol, "tol")
        if int(self.max_iter) < 1:
            raise UsageError(f"max_iter must be >= 1, got {self.max_iter}")
        self.max_iter = int(self.max_iter)


@dataclass
class RpcaSolution:
    """Decomposition ``X = A + E`` returned by every R-PCA solver."""

    A: np.ndarray
    E: np.ndarray
    iterations: int
    converged: bool
    objective: float
    lam: float = None
    noise_norm: str = None
    svd: SkinnySvd = field(default=None, repr=False)
    info: dict = field(default_factory=dict, repr=False)

    def residual(self, X):
        X = np.asarray(X, dtype=np.float64)
        scale = np.linalg.norm(X)
        return np.linalg.norm(X - self.A - self.E) / (scale if scale > 0 else 1.0)


@dataclass
class RlrrSolution:
    """Self-expressive solution ``(Z, E)`` with ``X - E = (X - E) Z``.

    ``provenance`` is one of ``redu_expr``, ``partial_adm`` or ``filtering``.
    """

    Z: np.ndarray
    E: np.ndarray
    provenance: str
    iterations: int = 0
    converged: bool = True
    A: np.ndarray = field(default=None, repr=False)
    info: dict = field(default_factory=dict, repr=False)

    def residual(self, X):
        D = np.asarray(X, dtype=np.float64) - self.E
        scale = np.linalg.norm(X)
        return np.linalg.norm(D - D @ self.Z) / (scale if scale > 0 else 1.0)


def default_lambda(shape, noise_norm):
    """``1/sqrt(max(m, n))`` for l1 noise, ``1/sqrt(log max(m, n))`` for l21."""
    n1 = max(shape)
    if noise_norm == "l1":
        return 1.0 / np.sqrt(n1)
    if noise_norm == "l21":
        if n1 < 2:
            raise UsageError("automatic l21 lambda needs at least 2 rows or columns")
        return 1.0 / np.sqrt(np.log(n1))
    raise UsageError(f"unknown noise norm {noise_norm!r}")


def _resolve(opts, shape, noise_norm):
    opts = opts if opts is not None else SolverOptions()
    if isinstance(opts.lam, str):
        return opts, default_lambda(shape, noise_norm)
    return opts, float(opts.lam)


def _noise_value(E, noise_norm):
    if noise_norm == "l1":
        return float(np.abs(E).sum())
    return float(np.linalg.norm(E, axis=0).sum())


def _solve_rpca(X, opts, noise_norm):
    X = as_matrix(X, "X")
    opts, lam = _resolve(opts, X.shape, noise_norm)
    prox = soft_threshold if noise_norm == "l1" else column_shrink
    m, n = X.shape

    norm_x = np.linalg.norm(X)
    if norm_x == 0:
        empty = SkinnySvd(np.zeros((m, 0)), np.zeros(0), np.zeros((n, 0)))
        return RpcaSolution(np.zeros_like(X), np.zeros_like(X), 0, True, 0.0, lam,
                            noise_norm, empty)

    mu = opts.mu0 if opts.mu0 is not None else 1.25 / np.linalg.norm(X, 2)
    Y = np.zeros_like(X)
    E = np.zeros_like(X)
    converged = False
    for it in range(1, opts.max_iter + 1):
        A, svd = _svt(X - E + Y / mu, 1.0 / mu)
        E = prox(X - A + Y / mu, lam / mu)
        R = X - A - E
        Y += mu * R
        res = np.linalg.norm(R) / norm_x
        if res <= opts.tol:
            converged = True
            break
        mu *= opts.rho
    logger.debug("rpca-%s: %d iterations, residual %.3e, rank %d",
                 noise_norm, it, res, svd.rank)
    objective = float(svd.sigma.sum()) + lam * _noise_value(E, noise_norm)
    return RpcaSolution(A, E, it, converged, objective, lam, noise_norm, svd)


def solve_rpca_l1(X, opts=None):
    """Principal component pursuit: ``min ||A||_* + lam ||E||_1  s.t. X = A + E``.

    With ``opts.lam == "auto"`` the weight is ``1/sqrt(max(m, n))``.
    Reaching ``max_iter`` is not an error; the result has ``converged=False``.
    """
    return _solve_rpca(X, opts, "l1")


def solve_rpca_l21(X, opts=None):
    """Column-sparse relaxed R-PCA: ``min ||A||_* + lam ||E||_{2,1}  s.t. X = A + E``.

    With ``opts.lam == "auto"`` the weight is ``1/sqrt(log max(m, n))``.
    """
    return _solve_rpca(X, opts, "l21")


def rpca_objective(A, E, lam, noise_norm):
    """Relaxed R-PCA objective ``||A||_* + lam * f(E)``."""
    A = as_matrix(A, "A")
    nuclear = float(np.linalg.svd(A, compute_uv=False).sum()) if A.size else 0.0
    return nuclear + lam * _noise_value(as_matrix(E, "E"), noise_norm)


def frobenius_rank_costs(sigma, lam):
    """``k + lam * sum_{i>k} sigma_i^2`` for ``k = 0..len(sigma)``."""
    sq = np.asarray(sigma, dtype=np.float64) ** 2
    tails = np.concatenate([np.cumsum(sq[::-1])[::-1], [0.0]])
    return np.arange(sq.size + 1) + lam * tails


def _frobenius_step(M, lam):
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    r = int(np.argmin(frobenius_rank_costs(s, lam)))
    V1 = Vt[:r].T
    return (U[:, :r] * s[:r]) @ Vt[:r], V1 @ V1.T, r


def solve_rlrr_frobenius(X, lam):
    """Closed-form relaxed R-LRR under squared Frobenius noise.

    Solves ``min ||Z||_* + lam ||E||_F^2  s.t. A = A Z, X = A + E`` by keeping
    the top ``r = argmin_k k + lam * sum_{i>k} sigma_i^2`` singular triplets
    of ``X``.

    Returns
    -------
    A : ndarray
        ``U_1 diag(sigma_1) V_1^T``.
    Z : ndarray
        ``V_1 V_1^T``, symmetric and idempotent.
    r : int
    """
    lam = check_positive(lam, "lam")
    X = as_matrix(X, "X")
    return _frobenius_step(X, lam)


def solve_rlrr_partial_adm(X, opts=None):
    """Relaxed R-LRR with column-sparse noise by partial ADM.

    Minimises the partial augmented Lagrangian
    ``||Z||_* + lam ||E||_{2,1} + <X - E - A, Y> + mu/2 ||X - E - A||_F^2``
    subject to ``A = A Z``. Each sweep shrinks the columns of ``E``, then
    updates ``(A, Z)`` jointly through the closed-form Frobenius solver with
    weight ``mu / 2``, then ascends the dual.

    The default ``lam`` is ``1/sqrt(log max(m, n))``.
    """
    X = as_matrix(X, "X")
    opts, lam = _resolve(opts, X.shape, "l21")
    m, n = X.shape

    norm_x = np.linalg.norm(X)
    if norm_x == 0:
        return RlrrSolution(np.zeros((n, n)), np.zeros_like(X), "partial_adm", 0, True,
                            np.zeros_like(X))

    mu = opts.mu0 if opts.mu0 is not None else 1.25 / np.linalg.norm(X, 2)
    Y = np.zeros_like(X)
    A = np.zeros_like(X)
    converged = False
    for it in range(1, opts.max_iter + 1):
        E = column_shrink(X - A + Y / mu, lam / mu)
        A, Z, r = _frobenius_step(X - E + Y / mu, mu / 2.0)
        R = X - A - E
        Y += mu * R
        res = np.linalg.norm(R) / norm_x
        if res <= opts.tol:
            converged = True
            break
        mu *= opts.rho
    logger.debug("partial-adm: %d iterations, residual %.3e, rank %d", it, res, r)
    return RlrrSolution(Z, E, "partial_adm", it, converged, A)
