import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from subspace_recovery.exceptions import InvalidInputError, UsageError
from subspace_recovery.matcore import (NORM_KINDS, column_shrink, lq_decompose, nonzero_columns,
                                       norm, numerical_rank, pseudo_inverse, skinny_svd,
                                       soft_threshold, svt)

from conftest import low_rank

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def matrices(max_side=6):
    shapes = st.tuples(st.integers(1, max_side), st.integers(1, max_side))
    return shapes.flatmap(lambda s: arrays(np.float64, s, elements=finite))


def test_skinny_svd_reconstructs_low_rank(rng):
    M = low_rank(rng, 9, 7, 3)
    svd = skinny_svd(M)
    assert svd.rank == 3
    assert svd.U.shape == (9, 3) and svd.V.shape == (7, 3)
    np.testing.assert_allclose(svd.reconstruct(), M, atol=1e-12)
    np.testing.assert_allclose(svd.U.T @ svd.U, np.eye(3), atol=1e-12)
    assert np.all(np.diff(svd.sigma) <= 0)


def test_skinny_svd_matches_eigen_decomposition_oracle(rng):
    # oracle: singular values are the square roots of the eigenvalues of M^T M
    M = rng.standard_normal((6, 4))
    eig = np.sort(np.linalg.eigvalsh(M.T @ M))[::-1]
    np.testing.assert_allclose(skinny_svd(M).sigma, np.sqrt(eig), rtol=1e-10)


def test_skinny_svd_of_zero_and_empty():
    svd = skinny_svd(np.zeros((3, 2)))
    assert svd.rank == 0 and svd.U.shape == (3, 0) and svd.V.shape == (2, 0)
    assert skinny_svd(np.zeros((0, 4))).rank == 0


def test_skinny_svd_identity_example():
    svd = skinny_svd(np.eye(3))
    np.testing.assert_allclose(svd.sigma, [1, 1, 1])


def test_non_finite_input_rejected():
    with pytest.raises(InvalidInputError):
        skinny_svd(np.array([[1.0, np.nan]]))
    with pytest.raises(InvalidInputError):
        norm(np.array([[np.inf]]), "fro")


def test_pseudo_inverse_penrose_conditions(rng):
    M = low_rank(rng, 8, 5, 2)
    P = pseudo_inverse(M)
    np.testing.assert_allclose(M @ P @ M, M, atol=1e-10)
    np.testing.assert_allclose(P @ M @ P, P, atol=1e-10)
    np.testing.assert_allclose(P, np.linalg.pinv(M), atol=1e-10)


def test_lq_decompose(rng):
    M = rng.standard_normal((3, 8))
    L, V = lq_decompose(M)
    np.testing.assert_allclose(L @ V.T, M, atol=1e-12)
    np.testing.assert_allclose(V.T @ V, np.eye(3), atol=1e-12)
    assert np.allclose(np.triu(L, 1), 0)
    assert np.all(np.diag(L) >= 0)


def test_norm_examples():
    M = np.array([[3.0, 0.0], [4.0, 0.0]])
    assert norm(M, "l21") == 5.0
    assert norm(M, "l1") == 7.0
    assert norm(M, "l20") == 1
    assert norm(M, "l0") == 2
    assert norm(M, "nuclear") == pytest.approx(5.0)
    assert norm(M, "spectral") == pytest.approx(5.0)
    assert norm(M, "fro") == pytest.approx(5.0)
    assert norm(np.diag([3.0, 4.0]), "nuclear") == pytest.approx(7.0)


def test_norm_unknown_kind():
    with pytest.raises(UsageError):
        norm(np.eye(2), "l3")


def test_counting_norms_ignore_roundoff():
    M = np.array([[1.0, 1e-14], [1.0, -1e-15]])
    assert norm(M, "l20") == 1
    assert norm(M, "l0") == 2
    np.testing.assert_array_equal(nonzero_columns(M), [0])


@given(matrices())
@settings(max_examples=60, deadline=None)
def test_norm_inequalities(M):
    nuc, fro, spec = norm(M, "nuclear"), norm(M, "fro"), norm(M, "spectral")
    assert spec <= fro * (1 + 1e-12) + 1e-12
    assert fro <= nuc * (1 + 1e-12) + 1e-12
    assert norm(M, "l21") <= norm(M, "l1") + 1e-9
    assert norm(M, "l20") <= M.shape[1]


def test_svt_example():
    np.testing.assert_allclose(svt(np.diag([3.0, 1.0]), 2.0), np.diag([1.0, 0.0]))


def test_thresholds_reject_negative():
    for fn in (svt, soft_threshold, column_shrink):
        with pytest.raises(UsageError):
            fn(np.eye(2), -1.0)


def test_soft_threshold_example():
    np.testing.assert_allclose(soft_threshold(np.array([[-3.0, 0.5, 2.0]]), 1.0),
                               [[-2.0, 0.0, 1.0]])


def test_column_shrink_example():
    out = column_shrink(np.array([[3.0, 0.3], [4.0, 0.4]]), 1.0)
    np.testing.assert_allclose(out, [[2.4, 0.0], [3.2, 0.0]])


def _prox_objective_l1(Y, M, tau):
    return 0.5 * np.sum((Y - M) ** 2) + tau * np.abs(Y).sum()


def _prox_objective_l21(Y, M, tau):
    return 0.5 * np.sum((Y - M) ** 2) + tau * np.linalg.norm(Y, axis=0).sum()


def _prox_objective_nuc(Y, M, tau):
    return 0.5 * np.sum((Y - M) ** 2) + tau * np.linalg.svd(Y, compute_uv=False).sum()


@pytest.mark.parametrize("op,obj", [(soft_threshold, _prox_objective_l1),
                                    (column_shrink, _prox_objective_l21),
                                    (svt, _prox_objective_nuc)])
def test_shrinkage_is_proximal_minimiser(rng, op, obj):
    # oracle: the prox beats random perturbations of itself on its own objective
    M = rng.standard_normal((5, 4))
    tau = 0.7
    Y = op(M, tau)
    best = obj(Y, M, tau)
    for _ in range(200):
        assert obj(Y + 1e-3 * rng.standard_normal(Y.shape), M, tau) >= best - 1e-12


def test_numerical_rank_zero_rule(rng):
    M = low_rank(rng, 10, 10, 4)
    assert numerical_rank(M) == 4
    assert numerical_rank(M + 1e-3 * rng.standard_normal((10, 10))) == 10


def test_norm_kinds_listed():
    assert set(NORM_KINDS) == {"nuclear", "l1", "l21", "fro", "l0", "l20", "spectral"}
