"""Closed-form solution families of the self-expressive low-rank models.

Every model handled here becomes an R-PCA problem once the denoised matrix
``A = X - E`` is fixed. Given ``(A, E)`` the representation matrices follow in
closed form from the skinny SVD ``A = U diag(s) V^T``:

* relaxed R-LRR      ``Z = V V^T`` (the shape interaction matrix)
* original R-LRR     ``Z = A^+ A + S V^T`` with ``V^T S = 0``
* original R-LatLRR  ``Z = V W V^T + S1 W V^T``,
                     ``L = U S (I-W) S^-1 U^T + U S (I-W) S2`` for idempotent ``W``
* relaxed R-LatLRR   ``Z = V W V^T``, ``L = U (I-W) U^T`` for ``0 <= W <= I``
                     commuting with ``diag(s)``

This is the "reduce then express" route: one R-PCA solve, then closed forms.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from ._validation import as_matrix, check_random_state
from .exceptions import InvalidInputError, InvalidParameterError, UsageError
from .matcore import SkinnySvd, norm, numerical_rank, skinny_svd
from .rpca import RlrrSolution, RpcaSolution

MODELS = ("rpca", "rlrr_original", "rlrr_relaxed", "latlrr_original", "latlrr_relaxed")

PARAM_ATOL = 1e-9
# singular values closer than this (relative to s_1) share a block
SIGMA_GROUP_RTOL = 1e-8
FEASIBILITY_RTOL = 1e-6


@dataclass
class LatLrrSolutionParams:
    """Free parameters selecting one member of a LatLRR solution family.

    ``variant="original"`` uses ``Wtilde`` (r x r idempotent), ``S1`` (n x r)
    and ``S2`` (r x m); ``None`` for ``S1``/``S2`` means zero.
    ``variant="relaxed"`` uses ``What`` (r x r, symmetric, eigenvalues in
    [0, 1], block-compatible with the singular values of ``A``).
    """

    variant: str = "relaxed"
    Wtilde: np.ndarray = None
    S1: np.ndarray = None
    S2: np.ndarray = None
    What: np.ndarray = None

    def __post_init__(self):
        if self.variant not in ("original", "relaxed"):
            raise UsageError(f"unknown LatLRR variant {self.variant!r}")


@dataclass
class LatLrrSolution:
    """Solution ``(Z, L, E)`` of a robust LatLRR model."""

    Z: np.ndarray
    L: np.ndarray
    E: np.ndarray
    variant: str
    A: np.ndarray = field(default=None, repr=False)

    def residual(self, X):
        D = np.asarray(X, dtype=np.float64) - self.E
        scale = np.linalg.norm(X)
        return np.linalg.norm(D - D @ self.Z - self.L @ D) / (scale if scale > 0 else 1.0)


def representation_rank(M):
    """Rank of a representation matrix (``Z`` or ``L``).

    Family parameters are only validated to ``PARAM_ATOL``, so singular values
    at or below ``PARAM_ATOL * max(1, ||M||_2)`` are treated as zero.
    """
    M = as_matrix(M)
    scale = float(np.linalg.norm(M, 2)) if M.size else 0.0
    return numerical_rank(M, atol=PARAM_ATOL * max(1.0, scale))


def _svd_of(A):
    return A if isinstance(A, SkinnySvd) else skinny_svd(A)


def shape_interaction(A):
    """Shape interaction matrix ``V_A V_A^T`` (equal to ``pinv(A) @ A``)."""
    svd = _svd_of(A)
    return svd.V @ svd.V.T


def original_lrr_solution(A, S=None):
    """Member ``pinv(A) A + S V_A^T`` of the original noiseless LRR solution set.

    ``S`` (n x rank(A)) must satisfy ``V_A^T S = 0``; ``None`` means zero.
    """
    A = as_matrix(A, "A")
    svd = skinny_svd(A)
    Z = svd.V @ svd.V.T
    if S is None or svd.rank == 0:
        return Z
    S = np.asarray(S, dtype=np.float64)
    if S.shape != (A.shape[1], svd.rank):
        raise InvalidParameterError(
            "shape(S)", f"S must have shape {(A.shape[1], svd.rank)}, got {S.shape}")
    if np.linalg.norm(svd.V.T @ S) > PARAM_ATOL * max(1.0, np.linalg.norm(S)):
        raise InvalidParameterError("V_A^T S = 0")
    return Z + S @ svd.V.T


def _rpca_pair(X, rpca):
    X = as_matrix(X, "X")
    A = np.asarray(rpca.A if isinstance(rpca, RpcaSolution) else rpca[0], dtype=np.float64)
    E = np.asarray(rpca.E if isinstance(rpca, RpcaSolution) else rpca[1], dtype=np.float64)
    if A.shape != X.shape or E.shape != X.shape:
        raise InvalidInputError("R-PCA components do not match the shape of X")
    scale = max(np.linalg.norm(X), 1.0)
    if np.linalg.norm(X - A - E) > FEASIBILITY_RTOL * scale:
        raise InvalidInputError("R-PCA solution is not feasible: A + E != X")
    return X, A, E


def redu_expr_rlrr(X, rpca, relaxed=True, S=None):
    """Express an R-LRR solution from an R-PCA solution ``(A*, E*)``.

    Returns ``(pinv(A*) A*, E*)`` for the relaxed model and
    ``(pinv(A*) A* + S V^T, E*)`` for the original one.
    """
    X, A, E = _rpca_pair(X, rpca)
    if relaxed:
        if S is not None:
            raise UsageError("S only parameterises the original R-LRR model")
        Z = shape_interaction(A)
    else:
        Z = original_lrr_solution(A, S)
    return RlrrSolution(Z, E, "redu_expr", A=A)


def _check_original(svd, params):
    r = svd.rank
    m, n = svd.shape
    W = np.eye(r) if params.Wtilde is None else np.asarray(params.Wtilde, dtype=np.float64)
    if W.shape != (r, r):
        raise InvalidParameterError("shape(Wtilde)", f"Wtilde must be {r} x {r}, got {W.shape}")
    if np.linalg.norm(W @ W - W) > PARAM_ATOL * max(1.0, np.linalg.norm(W)):
        raise InvalidParameterError("Wtilde^2 = Wtilde")
    S1 = np.zeros((n, r)) if params.S1 is None else np.asarray(params.S1, dtype=np.float64)
    S2 = np.zeros((r, m)) if params.S2 is None else np.asarray(params.S2, dtype=np.float64)
    if S1.shape != (n, r):
        raise InvalidParameterError("shape(S1)", f"S1 must be {n} x {r}, got {S1.shape}")
    if S2.shape != (r, m):
        raise InvalidParameterError("shape(S2)", f"S2 must be {r} x {m}, got {S2.shape}")
    if np.linalg.norm(svd.V.T @ S1) > PARAM_ATOL * max(1.0, np.linalg.norm(S1)):
        raise InvalidParameterError("V_A^T S1 = 0")
    if np.linalg.norm(S2 @ svd.U) > PARAM_ATOL * max(1.0, np.linalg.norm(S2)):
        raise InvalidParameterError("S2 U_A = 0")
    if r and representation_rank(S1) > representation_rank(W):
        raise InvalidParameterError("rank(S1) <= rank(Wtilde)")
    if r and representation_rank(S2) > representation_rank(np.eye(r) - W):
        raise InvalidParameterError("rank(S2) <= rank(I - Wtilde)")
    return W, S1, S2


def sigma_blocks(sigma):
    """Group indices of (sorted) singular values that are numerically equal."""
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.size == 0:
        return []
    tol = SIGMA_GROUP_RTOL * sigma[0]
    blocks, start = [], 0
    for i in range(1, sigma.size):
        if abs(sigma[i] - sigma[i - 1]) > tol:
            blocks.append(np.arange(start, i))
            start = i
    blocks.append(np.arange(start, sigma.size))
    return blocks


def _check_relaxed(svd, params):
    r = svd.rank
    W = np.eye(r) if params.What is None else np.asarray(params.What, dtype=np.float64)
    if W.shape != (r, r):
        raise InvalidParameterError("shape(What)", f"What must be {r} x {r}, got {W.shape}")
    if r == 0:
        return W
    scale = max(1.0, np.linalg.norm(W))
    if np.linalg.norm(W - W.T) > PARAM_ATOL * scale:
        raise InvalidParameterError("What symmetric")
    mask = np.ones((r, r), dtype=bool)
    for block in sigma_blocks(svd.sigma):
        mask[np.ix_(block, block)] = False
    if np.any(np.abs(W[mask]) > PARAM_ATOL * scale):
        raise InvalidParameterError("What block-compatible with sigma_A")
    eig = np.linalg.eigvalsh((W + W.T) / 2)
    if eig[0] < -PARAM_ATOL * scale:
        raise InvalidParameterError("What >= 0")
    if eig[-1] > 1 + PARAM_ATOL * scale:
        raise InvalidParameterError("I - What >= 0")
    return W


def original_latlrr_solutions(A, params):
    """Member of the original (rank) noiseless LatLRR solution family.

    Raises InvalidParameterError naming the first violated condition.
    """
    if params.variant != "original":
        raise UsageError("expected params.variant == 'original'")
    A = as_matrix(A, "A")
    svd = skinny_svd(A)
    W, S1, S2 = _check_original(svd, params)
    U, s, V = svd.U, svd.sigma, svd.V
    r = svd.rank
    Z = V @ W @ V.T + S1 @ W @ V.T
    US = U * s
    IW = np.eye(r) - W
    L = US @ IW @ (U / s).T + US @ IW @ S2
    return Z, L


def relaxed_latlrr_solutions(A, What):
    """Member ``(V W V^T, U (I - W) U^T)`` of the relaxed LatLRR family."""
    A = as_matrix(A, "A")
    svd = skinny_svd(A)
    W = _check_relaxed(svd, LatLrrSolutionParams("relaxed", What=What))
    U, V = svd.U, svd.V
    return V @ W @ V.T, U @ (np.eye(svd.rank) - W) @ U.T


def redu_expr_latlrr(X, rpca, params=None):
    """Express a robust LatLRR solution ``(Z, L, E*)`` from ``(A*, E*)``.

    ``params=None`` selects the relaxed member with ``What = I``.
    """
    X, A, E = _rpca_pair(X, rpca)
    params = params if params is not None else LatLrrSolutionParams("relaxed")
    if params.variant == "original":
        Z, L = original_latlrr_solutions(A, params)
    else:
        Z, L = relaxed_latlrr_solutions(A, params.What)
    return LatLrrSolution(Z, L, E, params.variant, A=A)


def _noise_term(E, noise):
    if callable(noise):
        return float(noise(E))
    if noise == "fro2":
        return float(np.linalg.norm(E) ** 2)
    return float(norm(E, noise))


def model_objective(model, solution, lam, noise="l20"):
    """Objective value of ``solution`` under ``model``.

    ``noise`` is a norm kind understood by :func:`matcore.norm`, ``"fro2"``
    for the squared Frobenius norm, or any callable ``f(E)``. Ranks use the
    numerical-rank rule of :func:`matcore.skinny_svd` for ``A`` and
    :func:`representation_rank` for ``Z`` and ``L``.
    """
    if model not in MODELS:
        raise UsageError(f"unknown model {model!r}; expected one of {MODELS}")
    f = lam * _noise_term(solution.E, noise)
    if model == "rpca":
        return numerical_rank(solution.A) + f
    if model == "rlrr_original":
        return representation_rank(solution.Z) + f
    if model == "rlrr_relaxed":
        return norm(solution.Z, "nuclear") + f
    if model == "latlrr_original":
        return representation_rank(solution.Z) + representation_rank(solution.L) + f
    return norm(solution.Z, "nuclear") + norm(solution.L, "nuclear") + f


def _denoised(solution, X):
    # prefer the exactly low-rank component a solver kept over X - E
    if getattr(solution, "A", None) is not None:
        return np.asarray(solution.A, dtype=np.float64)
    return X - solution.E


def infer_params(solution, model, A):
    """Recover the family parameters that reproduce ``solution`` from ``A``."""
    svd = skinny_svd(A)
    U, s, V = svd.U, svd.sigma, svd.V
    if model == "rlrr_original":
        S = (solution.Z - V @ V.T) @ V
        return S - V @ (V.T @ S)
    if model == "latlrr_relaxed":
        W = V.T @ solution.Z @ V
        return LatLrrSolutionParams("relaxed", What=(W + W.T) / 2)
    if model == "latlrr_original":
        W = V.T @ solution.Z @ V
        S1 = solution.Z @ V - V @ W
        S1 = (S1 - V @ (V.T @ S1)) @ W
        # this recovers (I - W) S2 for the generating S2, which yields the same L
        S2 = (U.T @ solution.L - (U.T @ solution.L @ U) @ U.T) / s[:, None]
        S2 = (np.eye(W.shape[0]) - W) @ (S2 - (S2 @ U) @ U.T)
        return LatLrrSolutionParams("original", Wtilde=W, S1=S1, S2=S2)
    return None


def cross_express(solution, source, target, X, *, S=None, params=None):
    """Re-express a solution of model ``source`` as a solution of ``target``.

    The route always passes through the R-PCA pair ``(A*, E*)``. When
    ``source == target`` and no parameters are given, the parameters of the
    incoming solution are recovered so it is returned unchanged.
    """
    for name in (source, target):
        if name not in MODELS:
            raise UsageError(f"unknown model {name!r}; expected one of {MODELS}")
    X = as_matrix(X, "X")
    A = _denoised(solution, X)
    E = np.asarray(solution.E, dtype=np.float64)
    if source == target and S is None and params is None and target != "rpca":
        inferred = infer_params(solution, target, A)
        if target == "rlrr_original":
            S = inferred
        else:
            params = inferred

    pair = (A, E)
    if target == "rpca":
        return RpcaSolution(A, E, 0, True, float("nan"))
    if target == "rlrr_relaxed":
        return redu_expr_rlrr(X, pair, relaxed=True)
    if target == "rlrr_original":
        return redu_expr_rlrr(X, pair, relaxed=False, S=S)
    variant = target.split("_")[1]
    if params is None:
        params = LatLrrSolutionParams(variant)
    elif params.variant != variant:
        raise UsageError(f"params are for the {params.variant} variant, target is {target}")
    return redu_expr_latlrr(X, pair, params)


def random_idempotent(r, random_state=None, oblique=True):
    """Random r x r idempotent matrix of random rank in ``0..r``.

    Built as the orthogonal projector ``P (P^T P)^-1 P^T`` and, if ``oblique``,
    conjugated by a random well-conditioned matrix.
    """
    rng = check_random_state(random_state)
    k = int(rng.integers(0, r + 1))
    if k == 0:
        return np.zeros((r, r))
    P = rng.standard_normal((r, k))
    W = P @ np.linalg.solve(P.T @ P, P.T)
    if oblique:
        T = np.eye(r) + 0.3 * rng.standard_normal((r, r)) / np.sqrt(r)
        W = T @ W @ np.linalg.inv(T)
    return W


def _low_rank_factor(rows, cols, max_rank, rng):
    t = int(rng.integers(0, max_rank + 1)) if max_rank > 0 else 0
    return rng.standard_normal((rows, t)) @ rng.standard_normal((t, cols))


def random_original_params(A, random_state=None):
    """Random valid ``(Wtilde, S1, S2)`` for the original LatLRR family of ``A``."""
    rng = check_random_state(random_state)
    svd = skinny_svd(A)
    r = svd.rank
    m, n = svd.shape
    W = random_idempotent(r, rng)
    rank_w = int(round(np.trace(W)))
    S1 = np.zeros((n, r))
    S2 = np.zeros((r, m))
    if n > r:
        S1 = null_space(svd.V.T) @ _low_rank_factor(n - r, r, rank_w, rng)
    if m > r:
        S2 = _low_rank_factor(r, m - r, r - rank_w, rng) @ null_space(svd.U.T).T
    return LatLrrSolutionParams("original", Wtilde=W, S1=S1, S2=S2)


def random_relaxed_params(A, random_state=None):
    """Random valid ``What`` for the relaxed LatLRR family of ``A``."""
    rng = check_random_state(random_state)
    svd = skinny_svd(A)
    W = np.zeros((svd.rank, svd.rank))
    for block in sigma_blocks(svd.sigma):
        g = block.size
        Q, _ = np.linalg.qr(rng.standard_normal((g, g)))
        W[np.ix_(block, block)] = (Q * rng.uniform(0, 1, g)) @ Q.T
    return LatLrrSolutionParams("relaxed", What=(W + W.T) / 2)
