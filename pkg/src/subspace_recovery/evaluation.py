"""Synthetic union-of-subspaces data, corruption models, clustering and metrics."""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh
from sklearn.cluster import KMeans

from ._validation import as_matrix, check_positive, check_random_state
from .exceptions import InvalidInputError, UsageError
from .matcore import skinny_svd

CORRUPTION_MODES = (
    "entrywise_uniform",
    "columnwise_gaussian",
    "columnwise_scaled_gaussian",
    "columnwise_uniform",
)

# default magnitude per corruption mode: uniform half-width or Gaussian std
DEFAULT_MAGNITUDE = {
    "entrywise_uniform": 0.6,
    "columnwise_gaussian": 1.0,
    "columnwise_scaled_gaussian": 0.1,
    "columnwise_uniform": 0.6,
}


@dataclass(frozen=True)
class SyntheticSpec:
    """Points drawn from ``num_subspaces`` random ``subspace_dim``-dim subspaces."""

    ambient_dim: int
    num_subspaces: int
    subspace_dim: int
    points_per_subspace: int
    seed: int = 0

    def __post_init__(self):
        for name in ("ambient_dim", "num_subspaces", "subspace_dim", "points_per_subspace"):
            if int(getattr(self, name)) < 1:
                raise UsageError(f"{name} must be positive")
        if self.num_subspaces * self.subspace_dim > self.ambient_dim:
            raise UsageError("independent subspaces need num_subspaces * subspace_dim "
                             "<= ambient_dim")


@dataclass(frozen=True)
class CorruptionSpec:
    """How to corrupt a clean dataset.

    ``entrywise_uniform`` adds U(-a, a) noise at a uniformly chosen
    ``fraction`` of the entries. The column-wise modes pick a ``fraction`` of
    the columns and add to each chosen column i.i.d. noise that is
    N(0, a^2) (``columnwise_gaussian``), N(0, (a ||x||)^2) where ``x`` is the
    clean column (``columnwise_scaled_gaussian``), or U(-a, a)
    (``columnwise_uniform``). ``magnitude=None`` uses the mode's default.
    With ``replace=True`` the chosen columns are overwritten by the noise
    instead (column-wise modes only).
    """

    mode: str
    fraction: float
    magnitude: float = None
    seed: int = 0
    replace: bool = False

    def __post_init__(self):
        if self.mode not in CORRUPTION_MODES:
            raise UsageError(f"unknown corruption mode {self.mode!r}")
        if not 0.0 <= float(self.fraction) <= 1.0:
            raise UsageError(f"fraction must lie in [0, 1], got {self.fraction}")
        if self.replace and self.mode == "entrywise_uniform":
            raise UsageError("replace=True needs a column-wise mode")

    @property
    def scale(self):
        return DEFAULT_MAGNITUDE[self.mode] if self.magnitude is None else self.magnitude


@dataclass
class LabeledDataset:
    X: np.ndarray
    labels: np.ndarray
    clean: np.ndarray
    noise_indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    @property
    def noise(self):
        return self.X - self.clean

    @property
    def n_clusters(self):
        return int(np.unique(self.labels).size)


def generate_subspace_data(spec):
    """Sample a clean data matrix whose columns lie on independent subspaces.

    Each basis is the Q factor of a Gaussian ``ambient_dim x subspace_dim``
    matrix; each point is ``basis @ g`` with ``g`` standard normal. Columns
    are grouped by subspace.
    """
    rng = check_random_state(spec.seed)
    blocks, labels = [], []
    for i in range(spec.num_subspaces):
        basis, _ = np.linalg.qr(rng.standard_normal((spec.ambient_dim, spec.subspace_dim)))
        coeffs = rng.standard_normal((spec.subspace_dim, spec.points_per_subspace))
        blocks.append(basis @ coeffs)
        labels.append(np.full(spec.points_per_subspace, i))
    X = np.hstack(blocks)
    return LabeledDataset(X, np.concatenate(labels), X.copy())


def corrupt(data, spec):
    """Return a copy of ``data`` with noise added per ``spec``.

    ``noise_indices`` records every column that received noise.
    """
    rng = check_random_state(spec.seed)
    clean = data.clean
    m, n = clean.shape
    X = clean.copy()
    a = spec.scale
    if spec.mode == "entrywise_uniform":
        count = int(round(spec.fraction * m * n))
        flat = rng.choice(m * n, size=count, replace=False)
        X.flat[flat] += rng.uniform(-a, a, size=count)
        cols = np.unique(flat % n)
    else:
        count = int(round(spec.fraction * n))
        cols = np.sort(rng.choice(n, size=count, replace=False))
        if spec.mode == "columnwise_gaussian":
            noise = a * rng.standard_normal((m, count))
        elif spec.mode == "columnwise_scaled_gaussian":
            noise = a * np.linalg.norm(clean[:, cols], axis=0) * rng.standard_normal((m, count))
        else:
            noise = rng.uniform(-a, a, size=(m, count))
        if spec.replace:
            X[:, cols] = noise
        else:
            X[:, cols] += noise
    return LabeledDataset(X, data.labels.copy(), clean.copy(), np.asarray(cols, dtype=int))


def spectral_cluster(Z, k, seed=0):
    """Normalized spectral clustering with affinity ``|Z|``.

    Uses the symmetric normalized Laplacian, its ``k`` bottom eigenvectors with
    rows scaled to unit length, and k-means with 20 seeded restarts.
    """
    Z = as_matrix(Z, "Z")
    n = Z.shape[0]
    if Z.shape[1] != n:
        raise InvalidInputError("affinity source must be square")
    k = int(k)
    if k < 1 or k > n:
        raise UsageError(f"need 1 <= k <= n, got k={k}, n={n}")
    W = np.abs(Z)
    W = (W + W.T) / 2
    deg = W.sum(axis=1)
    d = np.zeros_like(deg)
    d[deg > 0] = 1.0 / np.sqrt(deg[deg > 0])
    M = d[:, None] * W * d[None, :]
    # top eigenvectors of D^-1/2 W D^-1/2 = bottom eigenvectors of the Laplacian
    _, vecs = eigh(M, subset_by_index=[n - k, n - 1])
    rows = np.linalg.norm(vecs, axis=1)
    rows[rows == 0] = 1.0
    emb = vecs / rows[:, None]
    km = KMeans(n_clusters=k, n_init=20, max_iter=300, random_state=seed)
    return km.fit_predict(emb)


def clustering_accuracy(pred, truth):
    """Fraction of points whose cluster's majority ground-truth label matches theirs."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise UsageError(f"label arrays differ in length: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        return 1.0
    correct = 0
    for c in np.unique(pred):
        _, counts = np.unique(truth[pred == c], return_counts=True)
        correct += counts.max()
    return correct / pred.size


def index_hamming(predicted, truth, n):
    """Size of the symmetric difference of two index sets within ``0..n-1``."""
    p = {int(i) for i in predicted}
    t = {int(i) for i in truth}
    if any(i < 0 or i >= n for i in p | t):
        raise UsageError(f"indices must lie in 0..{n - 1}")
    return len(p ^ t)


def ridge_classify(F_train, H_train, F_test, gamma=0.8):
    """Ridge-regression linear classifier on column features.

    Fits ``W = H F^T (F F^T + gamma I)^-1`` and labels each test column by
    ``argmax(W f)``.

    Parameters
    ----------
    F_train : ndarray, shape (d, N)
    H_train : ndarray, shape (c, N) one-hot, or shape (N,) of class labels
    F_test : ndarray, shape (d, N_test)
    gamma : float

    Returns
    -------
    ndarray of predicted labels (class indices for one-hot input).
    """
    gamma = check_positive(gamma, "gamma")
    F = as_matrix(F_train, "F_train")
    Ft = as_matrix(F_test, "F_test")
    H = np.asarray(H_train)
    classes = None
    if H.ndim == 1:
        classes, idx = np.unique(H, return_inverse=True)
        H = np.eye(classes.size)[:, idx]
    W = np.linalg.solve(F @ F.T + gamma * np.eye(F.shape[0]), F @ H.T).T
    pred = np.argmax(W @ Ft, axis=0)
    return pred if classes is None else classes[pred]


@dataclass(frozen=True)
class Incoherence:
    mu_v: float
    mu_u: float
    mu_uv: float
    rank: int


def incoherence_diagnostics(A0):
    """Smallest incoherence constants ``mu`` satisfied by ``A0``.

    ``mu_v = n/r max_i ||V^T e_i||^2``, ``mu_u = m/r max_i ||U^T e_i||^2`` and
    ``mu_uv = mn/r ||U V^T||_inf^2``.
    """
    A0 = as_matrix(A0, "A0")
    svd = skinny_svd(A0)
    r = svd.rank
    if r == 0:
        raise InvalidInputError("rank 0: incoherence is undefined")
    m, n = A0.shape
    mu_v = n / r * float(np.max(np.sum(svd.V ** 2, axis=1)))
    mu_u = m / r * float(np.max(np.sum(svd.U ** 2, axis=1)))
    mu_uv = m * n / r * float(np.max(np.abs(svd.U @ svd.V.T))) ** 2
    return Incoherence(mu_v, mu_u, mu_uv, r)


def rank_support_check(A0, E0):
    """Evaluate the quantities in the rank/support recovery conditions.

    Reports the observed rank and support of the noise next to the ratios
    ``n2 / (mu log^2 n1)`` (entry-sparse noise) and ``n2 / (mu log n1)``
    (column-sparse noise). The numerical constants are left out, so the
    report is diagnostic only.
    """
    A0 = as_matrix(A0, "A0")
    E0 = as_matrix(E0, "E0")
    if A0.shape != E0.shape:
        raise InvalidInputError("A0 and E0 must have the same shape")
    m, n = A0.shape
    n1, n2 = max(m, n), min(m, n)
    rank = skinny_svd(A0).rank
    if rank:
        inc = incoherence_diagnostics(A0)
        mu_entry = max(inc.mu_u, inc.mu_v, inc.mu_uv)
        mu_col = inc.mu_v
    else:
        mu_entry = mu_col = float("nan")
    log_n1 = np.log(n1) if n1 > 1 else float("nan")
    support = int(np.count_nonzero(E0))
    col_support = int(np.count_nonzero(np.any(E0 != 0, axis=0)))
    return {
        "shape": (m, n),
        "rank": rank,
        "full_rank": rank == n2,
        "mu_entrywise": mu_entry,
        "mu_columnwise": mu_col,
        "entrywise_rank_ratio": n2 / (mu_entry * log_n1 ** 2),
        "columnwise_rank_ratio": n2 / (mu_col * log_n1),
        "support": support,
        "support_ratio": support / (m * n),
        "column_support": col_support,
        "column_support_ratio": col_support / n,
    }
