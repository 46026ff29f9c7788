"""scikit-learn compatible estimators.

These follow the scikit-learn convention of ``X`` with shape
``(n_samples, n_features)``. The functional API in the rest of the package
stores observations as *columns*, so every estimator transposes on entry and
exit.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .closed_forms import redu_expr_rlrr
from .evaluation import spectral_cluster
from .exceptions import UsageError
from .filtering import FilteringConfig, fast_rlrr, l1_filter, l21_filter
from .matcore import nonzero_columns, skinny_svd
from .rpca import SolverOptions, solve_rlrr_partial_adm, solve_rpca_l1, solve_rpca_l21

METHODS = ("redu-expr", "partial-adm", "filtering")


def _solver_options(est):
    return SolverOptions(lam=est.lam, mu0=est.mu0, rho=est.rho, tol=est.tol,
                         max_iter=est.max_iter)


class RobustPCA(TransformerMixin, BaseEstimator):
    """Robust PCA by the inexact augmented Lagrangian method.

    Parameters
    ----------
    noise_norm : {"l1", "l21"}, default="l1"
        ``"l1"`` for sparse entrywise corruption, ``"l21"`` for corrupted
        samples (outliers).
    lam : float or "auto", default="auto"
    filtering : bool, default=False
        Use the randomized filtering solver instead of the full solve.
    rank : int or "auto", default="auto"
        Target rank for ``filtering=True``.
    oversample : float, default=10.0
    mu0, rho, tol, max_iter :
        ADM schedule, see :class:`~subspace_recovery.rpca.SolverOptions`.
    random_state : int, default=0

    Attributes
    ----------
    low_rank_ : ndarray of shape (n_samples, n_features)
    sparse_ : ndarray of shape (n_samples, n_features)
    components_ : ndarray of shape (rank_, n_features)
        Orthonormal basis of the recovered low-rank subspace.
    outlier_indices_ : ndarray
        Samples with a nonzero noise row.
    """

    def __init__(self, noise_norm="l1", lam="auto", filtering=False, rank="auto",
                 oversample=10.0, mu0=None, rho=1.5, tol=1e-7, max_iter=1000,
                 random_state=0):
        self.noise_norm = noise_norm
        self.lam = lam
        self.filtering = filtering
        self.rank = rank
        self.oversample = oversample
        self.mu0 = mu0
        self.rho = rho
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        if self.noise_norm not in ("l1", "l21"):
            raise UsageError(f"noise_norm must be 'l1' or 'l21', got {self.noise_norm!r}")
        opts = _solver_options(self)
        D = X.T
        if self.filtering:
            cfg = FilteringConfig(rank=self.rank, oversample=self.oversample,
                                  seed=self.random_state, solver=opts)
            sol = (l1_filter if self.noise_norm == "l1" else l21_filter)(D, cfg)
        else:
            sol = (solve_rpca_l1 if self.noise_norm == "l1" else solve_rpca_l21)(D, opts)
        self.low_rank_ = sol.A.T
        self.sparse_ = sol.E.T
        svd = skinny_svd(sol.A)
        self.rank_ = svd.rank
        self.components_ = svd.U.T
        self.outlier_indices_ = nonzero_columns(sol.E)
        self.n_iter_ = sol.iterations
        self.converged_ = sol.converged
        self.objective_ = sol.objective
        self.lambda_ = sol.lam
        self.n_features_in_ = X.shape[1]
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).low_rank_

    def transform(self, X):
        """Least-squares projection of samples onto the recovered subspace."""
        check_is_fitted(self, "components_")
        X = check_array(X, dtype=np.float64)
        return (X @ self.components_.T) @ self.components_


class RobustLRR(ClusterMixin, BaseEstimator):
    """Subspace clustering with the relaxed robust LRR model.

    Parameters
    ----------
    n_clusters : int, default=2
    method : {"redu-expr", "partial-adm", "filtering"}, default="redu-expr"
        ``redu-expr`` solves column-sparse robust PCA and expresses the shape
        interaction matrix in closed form; ``filtering`` does the same with
        the randomized l2,1 filter; ``partial-adm`` is the iterative baseline.
    lam : float or "auto", default="auto"
    rank, oversample :
        Filtering settings, used by ``method="filtering"`` only.
    random_state : int, default=0
        Seeds sampling and the k-means restarts.

    Attributes
    ----------
    representation_matrix_ : ndarray of shape (n_samples, n_samples)
    noise_ : ndarray of shape (n_samples, n_features)
    outlier_indices_ : ndarray
    labels_ : ndarray of shape (n_samples,)
    """

    def __init__(self, n_clusters=2, method="redu-expr", lam="auto", rank="auto",
                 oversample=10.0, mu0=None, rho=1.5, tol=1e-7, max_iter=1000,
                 random_state=0):
        self.n_clusters = n_clusters
        self.method = method
        self.lam = lam
        self.rank = rank
        self.oversample = oversample
        self.mu0 = mu0
        self.rho = rho
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def fit_representation(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        if self.method not in METHODS:
            raise UsageError(f"method must be one of {METHODS}, got {self.method!r}")
        opts = _solver_options(self)
        D = X.T
        if self.method == "redu-expr":
            sol = redu_expr_rlrr(D, solve_rpca_l21(D, opts))
        elif self.method == "partial-adm":
            sol = solve_rlrr_partial_adm(D, opts)
        else:
            cfg = FilteringConfig(rank=self.rank, oversample=self.oversample,
                                  seed=self.random_state, solver=opts)
            sol = fast_rlrr(D, cfg)
        self.representation_matrix_ = sol.Z
        self.noise_ = sol.E.T
        self.outlier_indices_ = nonzero_columns(sol.E)
        self.n_features_in_ = X.shape[1]
        return self

    def fit(self, X, y=None):
        self.fit_representation(X)
        self.labels_ = spectral_cluster(self.representation_matrix_, self.n_clusters,
                                        seed=self.random_state)
        return self


class RidgeSubspaceClassifier(ClassifierMixin, BaseEstimator):
    """Linear classifier ``argmax(W f)`` with ``W`` from ridge regression on one-hot targets.

    Typically fed with columns of a representation matrix as features.
    """

    def __init__(self, gamma=0.8):
        self.gamma = gamma

    def fit(self, X, y):
        X = check_array(X, dtype=np.float64)
        y = np.asarray(y)
        if self.gamma <= 0:
            raise UsageError("gamma must be positive")
        self.classes_, idx = np.unique(y, return_inverse=True)
        H = np.eye(self.classes_.size)[:, idx]
        F = X.T
        self.coef_ = np.linalg.solve(F @ F.T + self.gamma * np.eye(F.shape[0]), F @ H.T).T
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=np.float64)
        return X @ self.coef_.T

    def predict(self, X):
        return self.classes_[np.argmax(self.decision_function(X), axis=1)]
