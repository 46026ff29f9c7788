"""Randomized column-sampling solvers for robust PCA and relaxed R-LRR.

Both filters recover a small *seed* block by a full ADM solve and then
extend it to the rest of the matrix by regression, so the cost is linear in
the matrix size for a fixed target rank.
"""

from dataclasses import dataclass, field
import logging
import math

import numpy as np

from ._validation import as_matrix, check_random_state
from .exceptions import SeedDeficientError, UsageError
from .matcore import lq_decompose, pseudo_inverse, soft_threshold
from .rpca import RlrrSolution, RpcaSolution, SolverOptions, solve_rpca_l1, solve_rpca_l21

logger = logging.getLogger(__name__)

MAX_RESAMPLES = 3


@dataclass
class FilteringConfig:
    """Sampling configuration.

    ``rank`` is the target rank r, or ``"auto"`` to take it from the seed
    solve. ``oversample`` (s) sets the number of sampled columns to
    ``ceil(s * r)``; ``row_oversample``/``col_oversample`` override it for the
    l1 filter, which samples rows as well.
    """

    rank: object = "auto"
    oversample: float = 10.0
    row_oversample: float = None
    col_oversample: float = None
    seed: int = 0
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        if not (isinstance(self.rank, str) and self.rank == "auto"):
            if int(self.rank) < 1:
                raise UsageError(f"rank must be a positive integer, got {self.rank}")
            self.rank = int(self.rank)
        for name in ("oversample", "row_oversample", "col_oversample"):
            value = getattr(self, name)
            if value is not None and not float(value) > 1:
                raise UsageError(f"{name} must exceed 1, got {value}")

    def sample_size(self, factor, total, rank):
        k = int(math.ceil(factor * rank))
        if k > total:
            raise UsageError(f"cannot sample {k} of {total} (s * r exceeds the dimension)")
        return k


def estimate_rank(X, oversample=10.0, seed=0, solver=None):
    """Estimate the rank of the low-rank part from growing seed solves.

    Starts from r = 1, samples ``ceil(s r)`` columns, and replaces r by the
    numerical rank of the recovered seed until the seed no longer reveals a
    higher rank (or every column has been sampled).
    """
    X = as_matrix(X, "X")
    n = X.shape[1]
    rng = check_random_state(seed)
    solver = solver if solver is not None else SolverOptions()
    r = 1
    while True:
        k = min(n, int(math.ceil(oversample * r)))
        cols = np.sort(rng.choice(n, size=k, replace=False))
        lam = solver.lam if not isinstance(solver.lam, str) else (
            1.0 / math.sqrt(math.log(k)) if k > 1 else 1.0)
        opts = SolverOptions(lam=lam, mu0=solver.mu0, rho=solver.rho, tol=solver.tol,
                             max_iter=solver.max_iter)
        found = solve_rpca_l21(X[:, cols], opts).svd.rank
        if found <= r or k == n:
            return max(found, 1)
        r = found


def _target_rank(X, cfg):
    if cfg.rank != "auto":
        return cfg.rank
    s = max(cfg.oversample, cfg.col_oversample or 0)
    return estimate_rank(X, s, cfg.seed, cfg.solver)


@dataclass
class _SeedFit:
    cols: np.ndarray
    rest: np.ndarray
    seed: RpcaSolution
    proj: np.ndarray  # U_l^T X_r


def _l21_seed(X, cfg):
    m, n = X.shape
    rank = _target_rank(X, cfg)
    rng = check_random_state(cfg.seed)
    k = cfg.sample_size(cfg.oversample, n, rank)
    lam = cfg.solver.lam
    if isinstance(lam, str):
        lam = 1.0 / math.sqrt(math.log(k)) if k > 1 else 1.0
    opts = SolverOptions(lam=lam, mu0=cfg.solver.mu0, rho=cfg.solver.rho,
                         tol=cfg.solver.tol, max_iter=cfg.solver.max_iter)
    for attempt in range(MAX_RESAMPLES + 1):
        cols = np.sort(rng.choice(n, size=k, replace=False))
        seed = solve_rpca_l21(X[:, cols], opts)
        if seed.svd.rank >= rank:
            break
        logger.info("seed rank %d below target on attempt %d, resampling",
                    seed.svd.rank, attempt + 1)
    else:
        raise SeedDeficientError(
            f"seed matrix rank {seed.svd.rank} < {rank} after {MAX_RESAMPLES} resamples")
    rest = np.setdiff1d(np.arange(n), cols)
    proj = seed.svd.U.T @ X[:, rest]
    return _SeedFit(cols, rest, seed, proj)


def _assemble_l21(X, fit):
    A = np.empty_like(X)
    A[:, fit.cols] = fit.seed.A
    A[:, fit.rest] = fit.seed.svd.U @ fit.proj
    return A


def l21_filter(X, cfg=None):
    """Column-sparse robust PCA by l2,1 filtering.

    Samples ``ceil(s r)`` columns, solves the small column-sparse R-PCA on
    them with ``lam = 1/sqrt(log(s r))``, then recovers every other column by
    least squares against the seed's column space: ``A_r = U_l (U_l^T X_r)``.

    Returns an :class:`RpcaSolution` in the original column order;
    ``iterations`` and ``converged`` describe the seed solve.
    """
    X = as_matrix(X, "X")
    cfg = cfg if cfg is not None else FilteringConfig()
    fit = _l21_seed(X, cfg)
    A = _assemble_l21(X, fit)
    E = X - A
    objective = float(fit.seed.svd.sigma.sum()) + fit.seed.lam * float(
        np.linalg.norm(E, axis=0).sum())
    sol = RpcaSolution(A, E, fit.seed.iterations, fit.seed.converged, objective,
                       fit.seed.lam, "l21")
    sol.info["sample_columns"] = fit.cols
    return sol


def fast_rlrr(X, cfg=None):
    """Relaxed R-LRR through l2,1 filtering and an LQ factorisation.

    The filtered low-rank part equals ``U_l [diag(s_l) V_l^T, U_l^T X_r]``, so
    its row space is that of the small matrix ``[diag(s_l) V_l^T, U_l^T X_r]``.
    An LQ factorisation of that matrix gives an orthonormal basis ``V`` of the
    row space and ``Z = V V^T``.
    """
    X = as_matrix(X, "X")
    cfg = cfg if cfg is not None else FilteringConfig()
    fit = _l21_seed(X, cfg)
    svd = fit.seed.svd
    n = X.shape[1]
    order = np.concatenate([fit.cols, fit.rest])
    small = np.empty((svd.rank, n))
    small[:, order] = np.hstack([svd.sigma[:, None] * svd.V.T, fit.proj])
    _, V = lq_decompose(small)
    Z = V @ V.T
    A = _assemble_l21(X, fit)
    sol = RlrrSolution(Z, X - A, "filtering", fit.seed.iterations, fit.seed.converged, A)
    sol.info["sample_columns"] = fit.cols
    return sol


def l1_regression(D, B, opts=None):
    """Solve ``min_Q ||B - D Q||_1`` by ADM.

    Returns ``(Q, E)`` with ``B = D Q + E``; the minimum-norm ``Q`` is used
    where ``D`` is rank deficient.
    """
    opts = opts if opts is not None else SolverOptions()
    D_pinv = pseudo_inverse(D)
    norm_b = np.linalg.norm(B)
    Q = np.zeros((D.shape[1], B.shape[1]))
    if norm_b == 0:
        return Q, np.zeros_like(B)
    mu = opts.mu0 if opts.mu0 is not None else 1.25 / np.linalg.norm(B, 2)
    Y = np.zeros_like(B)
    E = np.zeros_like(B)
    for _ in range(opts.max_iter):
        Q = D_pinv @ (B - E + Y / mu)
        DQ = D @ Q
        E = soft_threshold(B - DQ + Y / mu, 1.0 / mu)
        R = B - DQ - E
        Y += mu * R
        if np.linalg.norm(R) / norm_b <= opts.tol:
            break
        mu *= opts.rho
    return Q, E


def l1_filter(X, cfg=None):
    """Entry-sparse robust PCA by l1 filtering.

    Samples an ``s_r r x s_c r`` seed block, recovers it by principal
    component pursuit with ``lam = 1/sqrt(max(s_r r, s_c r))``, fits the
    remaining column block ``X^c ~ A^s Q`` and row block ``X^r ~ P^T A^s`` by
    l1 regression, and completes the last block as ``P^T A^s Q``.
    """
    X = as_matrix(X, "X")
    cfg = cfg if cfg is not None else FilteringConfig()
    m, n = X.shape
    rank = _target_rank(X, cfg)
    rng = check_random_state(cfg.seed)
    s_r = cfg.row_oversample or cfg.oversample
    s_c = cfg.col_oversample or cfg.oversample
    kr = cfg.sample_size(s_r, m, rank)
    kc = cfg.sample_size(s_c, n, rank)
    lam = cfg.solver.lam
    if isinstance(lam, str):
        lam = 1.0 / math.sqrt(max(kr, kc))
    opts = SolverOptions(lam=lam, mu0=cfg.solver.mu0, rho=cfg.solver.rho,
                         tol=cfg.solver.tol, max_iter=cfg.solver.max_iter)

    for attempt in range(MAX_RESAMPLES + 1):
        rows = np.sort(rng.choice(m, size=kr, replace=False))
        cols = np.sort(rng.choice(n, size=kc, replace=False))
        seed = solve_rpca_l1(X[np.ix_(rows, cols)], opts)
        if seed.svd.rank >= rank:
            break
    else:
        raise SeedDeficientError(
            f"seed matrix rank {seed.svd.rank} < {rank} after {MAX_RESAMPLES} resamples")
    rrest = np.setdiff1d(np.arange(m), rows)
    crest = np.setdiff1d(np.arange(n), cols)

    reg_opts = SolverOptions(rho=cfg.solver.rho, tol=cfg.solver.tol,
                             max_iter=cfg.solver.max_iter)
    As = seed.A
    Q, _ = l1_regression(As, X[np.ix_(rows, crest)], reg_opts)
    P, _ = l1_regression(As.T, X[np.ix_(rrest, cols)].T, reg_opts)

    A = np.empty_like(X)
    A[np.ix_(rows, cols)] = As
    A[np.ix_(rows, crest)] = As @ Q
    A[np.ix_(rrest, cols)] = P.T @ As
    A[np.ix_(rrest, crest)] = P.T @ (As @ Q)
    E = X - A
    objective = float(seed.svd.sigma.sum()) + seed.lam * float(np.abs(E).sum())
    sol = RpcaSolution(A, E, seed.iterations, seed.converged, objective, seed.lam, "l1")
    sol.info.update(sample_rows=rows, sample_columns=cols)
    return sol
