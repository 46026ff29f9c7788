"""Robust PCA, robust LRR and robust LatLRR with closed-form reductions.

The non-convex self-expressive models are solved by one robust PCA solve
followed by a closed-form expression of the shape interaction matrix; a
randomized l2,1 filter brings the cost down to near-linear time.
"""

from .bench import (ExperimentReport, bench_fig2, bench_scaling, bench_table2,
                    bench_table4)
from .closed_forms import (MODELS, LatLrrSolution, LatLrrSolutionParams, cross_express,
                           model_objective, original_latlrr_solutions, original_lrr_solution,
                           random_original_params, random_relaxed_params,
                           redu_expr_latlrr, redu_expr_rlrr, relaxed_latlrr_solutions,
                           shape_interaction)
from .estimators import RidgeSubspaceClassifier, RobustLRR, RobustPCA
from .evaluation import (CorruptionSpec, LabeledDataset, SyntheticSpec, clustering_accuracy,
                         corrupt, generate_subspace_data, incoherence_diagnostics,
                         index_hamming, rank_support_check, ridge_classify,
                         spectral_cluster)
from .exceptions import (InvalidInputError, InvalidParameterError, MatrixParseError,
                         SeedDeficientError, UsageError)
from .filtering import FilteringConfig, estimate_rank, fast_rlrr, l1_filter, l21_filter
from .io import read_matrix_csv, write_matrix_csv
from .matcore import (SkinnySvd, column_shrink, lq_decompose, norm, numerical_rank,
                      pseudo_inverse, skinny_svd, soft_threshold, svt)
from .rpca import (RlrrSolution, RpcaSolution, SolverOptions, solve_rlrr_frobenius,
                   solve_rlrr_partial_adm, solve_rpca_l1, solve_rpca_l21)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
