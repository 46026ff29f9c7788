"""Synthetic experiment runners that emit long-format CSV reports.

Every runner is deterministic given its seeds. Wall-clock times cover the
solver calls only; data generation, clustering of the output and I/O are
excluded.
"""

from dataclasses import dataclass, field
import csv
import io
import logging
import math
import time

import numpy as np

from .closed_forms import model_objective, redu_expr_rlrr
from .evaluation import (CorruptionSpec, SyntheticSpec, clustering_accuracy, corrupt,
                         generate_subspace_data, incoherence_diagnostics, index_hamming,
                         spectral_cluster)
from .exceptions import SeedDeficientError, UsageError
from .filtering import FilteringConfig, fast_rlrr
from .matcore import nonzero_columns, norm, numerical_rank
from .rpca import SolverOptions, solve_rlrr_partial_adm, solve_rpca_l21

logger = logging.getLogger(__name__)

METRICS = ("rank_Z", "l20_E", "objective", "accuracy", "hamming", "time_s", "mu_v")
HEADER = ("experiment", "param", "metric", "value", "time_s", "seed")
AGGREGATE_SEED = "all"
METHODS = ("redu-expr", "partial-adm", "filtering")


@dataclass(frozen=True)
class ReportRow:
    experiment: str
    param: str
    metric: str
    value: float
    time_s: float
    seed: object

    def __post_init__(self):
        if self.metric not in METRICS:
            raise UsageError(f"metric {self.metric!r} not in {METRICS}")

    def key(self):
        seed = -1 if self.seed == AGGREGATE_SEED else int(self.seed)
        return (self.experiment, self.param, self.metric, seed)


@dataclass
class ExperimentReport:
    rows: list = field(default_factory=list)

    def add(self, experiment, param, metric, value, time_s, seed):
        self.rows.append(ReportRow(experiment, param, metric, float(value), float(time_s), seed))

    def sorted_rows(self):
        return sorted(self.rows, key=ReportRow.key)

    def values(self, metric, param=None, experiment=None, aggregate=False):
        """Values of ``metric`` filtered by ``param``/``experiment``, in seed order."""
        out = []
        for row in self.sorted_rows():
            if row.metric != metric:
                continue
            if param is not None and row.param != param:
                continue
            if experiment is not None and row.experiment != experiment:
                continue
            if (row.seed == AGGREGATE_SEED) != aggregate:
                continue
            out.append(row.value)
        return out

    def add_means(self):
        """Append one ``seed=all`` row per (experiment, param, metric) group."""
        groups = {}
        for row in self.rows:
            if row.seed == AGGREGATE_SEED:
                continue
            groups.setdefault((row.experiment, row.param, row.metric), []).append(row)
        for (exp, param, metric), rows in groups.items():
            self.add(exp, param, metric, np.mean([r.value for r in rows]),
                     np.mean([r.time_s for r in rows]), AGGREGATE_SEED)
        return self

    def to_csv(self, fh=None):
        """Write the report; returns the CSV text when ``fh`` is None."""
        buf = fh if fh is not None else io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(HEADER)
        for row in self.sorted_rows():
            writer.writerow([row.experiment, row.param, row.metric, _fmt(row.value),
                             _fmt(row.time_s), row.seed])
        if fh is None:
            return buf.getvalue()
        return None


def _fmt(x):
    if math.isnan(x):
        return "nan"
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.6g}"


def _timed(fn, *args):
    # numerical failures become a None result so the row is still recorded
    t0 = time.perf_counter()
    try:
        out = fn(*args)
    except (SeedDeficientError, np.linalg.LinAlgError) as exc:
        logger.warning("%s failed: %s", getattr(fn, "__name__", fn), exc)
        out = None
    return out, time.perf_counter() - t0


def _or_nan(sol, fn):
    return float("nan") if sol is None else fn(sol)


def bench_table2(D_values=(5, 10), seeds=range(10), fraction=0.15, replace=False, opts=None):
    """Noise-index identification by column-sparse R-PCA on full-rank structured data.

    Five independent ``D``-dim subspaces in ``R^{5D}`` with ``20 D`` points
    each; ``fraction`` of the columns receive additive N(0, 1) noise (or are
    replaced by it with ``replace=True``); ``lam = 1/sqrt(log(100 D))``.
    """
    report = ExperimentReport()
    for D in D_values:
        for seed in seeds:
            data = generate_subspace_data(SyntheticSpec(5 * D, 5, D, 20 * D, seed))
            data = corrupt(data, CorruptionSpec("columnwise_gaussian", fraction, seed=seed + 10**6,
                                                replace=replace))
            n = data.X.shape[1]
            o = opts or SolverOptions()
            o = SolverOptions(lam=1 / math.sqrt(math.log(n)), mu0=o.mu0, rho=o.rho,
                              tol=o.tol, max_iter=o.max_iter)
            sol, dt = _timed(solve_rpca_l21, data.X, o)
            ham = _or_nan(sol, lambda s: index_hamming(nonzero_columns(s.E),
                                                        data.noise_indices, n))
            param = f"D={D}"
            report.add("table2", param, "hamming", ham, dt, seed)
            report.add("table2", param, "time_s", dt, dt, seed)
            report.add("table2", param, "rank_Z", _or_nan(sol, lambda s: numerical_rank(s.A)), dt,
                       seed)
            report.add("table2", param, "mu_v", incoherence_diagnostics(data.clean).mu_v, 0.0, seed)
    return report.add_means()


def _table4_data(noise, seed, ambient, subspaces, dim, points, mode="columnwise_uniform"):
    data = generate_subspace_data(SyntheticSpec(ambient, subspaces, dim, points, seed))
    return corrupt(data, CorruptionSpec(mode, noise, seed=seed + 10**6))


def _solve_rlrr(method, X, opts, cfg=None):
    if method == "redu-expr":
        return redu_expr_rlrr(X, solve_rpca_l21(X, opts))
    if method == "partial-adm":
        return solve_rlrr_partial_adm(X, opts)
    if method == "filtering":
        return fast_rlrr(X, cfg)
    raise UsageError(f"unknown method {method!r}; expected one of {METHODS}")


def bench_table4(noise_levels=(0.0, 0.1, 0.2, 0.3), seeds=(0,), ambient=1000, subspaces=5,
                 dim=4, points=200, methods=("redu-expr", "partial-adm"), opts=None):
    """Optimality of relaxed R-LRR solutions: rank(Z), ||E||_{2,0} and their objective.

    A ``noise`` fraction of the columns receive additive U(-0.6, 0.6) noise.
    The objective is ``rank(Z) + lam ||E||_{2,0}`` with ``lam = 1/sqrt(log n)``.
    """
    report = ExperimentReport()
    opts = opts or SolverOptions()
    for noise in noise_levels:
        for seed in seeds:
            data = _table4_data(noise, seed, ambient, subspaces, dim, points)
            n = data.X.shape[1]
            lam = 1 / math.sqrt(math.log(n))
            o = SolverOptions(lam=lam, mu0=opts.mu0, rho=opts.rho, tol=opts.tol,
                              max_iter=opts.max_iter)
            for method in methods:
                sol, dt = _timed(_solve_rlrr, method, data.X, o)
                param = f"noise={noise:g};method={method}"
                report.add("table4", param, "rank_Z", _or_nan(sol, lambda s: numerical_rank(s.Z)),
                           dt, seed)
                report.add("table4", param, "l20_E", _or_nan(sol, lambda s: norm(s.E, "l20")),
                           dt, seed)
                report.add("table4", param, "objective", _or_nan(
                    sol, lambda s: model_objective("rlrr_original", s, lam, "l20")), dt, seed)
                report.add("table4", param, "time_s", dt, dt, seed)
    return report.add_means()


def bench_fig2(levels=(0.0, 0.1, 0.2, 0.3, 0.4, 0.5), seeds=range(10), ambient=200,
               subspaces=5, dim=4, points=40, methods=("redu-expr", "partial-adm"), opts=None):
    """Clustering accuracy under entrywise U(-0.6, 0.6) corruption.

    ``lam = 1/sqrt(log n)`` for both methods; the affinity ``|Z|`` is
    clustered by normalized spectral clustering.
    """
    report = ExperimentReport()
    opts = opts or SolverOptions()
    for level in levels:
        for seed in seeds:
            data = _table4_data(level, seed, ambient, subspaces, dim, points,
                                mode="entrywise_uniform")
            n = data.X.shape[1]
            o = SolverOptions(lam=1 / math.sqrt(math.log(n)), mu0=opts.mu0, rho=opts.rho,
                              tol=opts.tol, max_iter=opts.max_iter)
            for method in methods:
                sol, dt = _timed(_solve_rlrr, method, data.X, o)
                acc = _or_nan(sol, lambda s: clustering_accuracy(
                    spectral_cluster(s.Z, subspaces, seed=seed), data.labels))
                param = f"noise={level:g};method={method}"
                report.add("fig2", param, "accuracy", acc, dt, seed)
    return report.add_means()


def bench_scaling(sizes=(250, 500, 1000, 2000), methods=METHODS, seeds=(0,), rank=20,
                  oversample=10.0, subspaces=5, fraction=0.05, opts=None):
    """Run time of relaxed R-LRR solvers on ``size x size`` problems.

    Data: ``subspaces`` independent subspaces of total dimension ``rank`` in
    ``R^size``, ``size / subspaces`` points each, and ``fraction`` of the
    columns perturbed by Gaussian noise of standard deviation ``0.1 ||x||``.
    """
    report = ExperimentReport()
    opts = opts or SolverOptions()
    if rank % subspaces:
        raise UsageError("rank must be a multiple of the number of subspaces")
    for size in sizes:
        for seed in seeds:
            data = generate_subspace_data(
                SyntheticSpec(size, subspaces, rank // subspaces, size // subspaces, seed))
            data = corrupt(data, CorruptionSpec("columnwise_scaled_gaussian", fraction,
                                                seed=seed + 10**6))
            cfg = FilteringConfig(rank=rank, oversample=oversample, seed=seed, solver=opts)
            for method in methods:
                sol, dt = _timed(_solve_rlrr, method, data.X, opts, cfg)
                param = f"n={size};method={method}"
                report.add("scaling", param, "time_s", dt, dt, seed)
                report.add("scaling", param, "rank_Z",
                           _or_nan(sol, lambda s: numerical_rank(s.Z)), dt, seed)
    return report.add_means()
