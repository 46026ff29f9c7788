"""Acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary and on
stdout, before asserting.
"""

import math
import time

import numpy as np
import pytest

from subspace_recovery.bench import bench_fig2, bench_table2, bench_table4
from subspace_recovery.closed_forms import (LatLrrSolutionParams, cross_express,
                                            model_objective, original_latlrr_solutions,
                                            random_original_params, random_relaxed_params,
                                            redu_expr_latlrr, redu_expr_rlrr,
                                            relaxed_latlrr_solutions, representation_rank)
from subspace_recovery.evaluation import (CorruptionSpec, SyntheticSpec, corrupt,
                                          generate_subspace_data)
from subspace_recovery.exceptions import InvalidParameterError
from subspace_recovery.filtering import FilteringConfig, fast_rlrr
from subspace_recovery.matcore import norm, numerical_rank, skinny_svd
from subspace_recovery.rpca import (SolverOptions, solve_rlrr_frobenius,
                                    solve_rlrr_partial_adm, solve_rpca_l1, solve_rpca_l21)

from conftest import ACCEPTANCE_LINES


def record(number, name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number} {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.mark.parametrize("D", [5, 10])
def test_c1_noise_index_identification(D):
    # 15% of the columns replaced by N(0, 1) noise, lam = 1/sqrt(log(100 D))
    rep = bench_table2(D_values=(D,), seeds=range(10), replace=True)
    hams = rep.values("hamming")
    times = rep.values("time_s")
    exact = sum(h == 0 for h in hams)
    ok = exact >= 9 and max(times) < 120
    # not gating: the same instances with the noise added to the clean columns
    additive = sum(h == 0 for h in bench_table2(D_values=(D,), seeds=range(10)).values("hamming"))
    record(f"1 (D={D})", "noise-index identification",
           ok, f"hamming 0 in {exact}/10 seeds (need >= 9), hammings {hams}, "
               f"max time {max(times):.2f}s; informational: additive noise gives "
               f"hamming 0 in {additive}/10")


TABLE4_OBJECTIVES = {0.0: 20.00, 0.1: 58.05, 0.2: 96.10, 0.3: 134.14}


def test_c2_table4_redu_expr_optimality():
    t0 = time.perf_counter()
    rep = bench_table4(noise_levels=tuple(TABLE4_OBJECTIVES), seeds=(0,))
    total = time.perf_counter() - t0
    failures, details = [], []
    for noise, target in TABLE4_OBJECTIVES.items():
        redu = f"noise={noise:g};method=redu-expr"
        padm = f"noise={noise:g};method=partial-adm"
        rank = rep.values("rank_Z", param=redu)[0]
        l20 = rep.values("l20_E", param=redu)[0]
        obj = rep.values("objective", param=redu)[0]
        obj_p = rep.values("objective", param=padm)[0]
        details.append(f"{noise:g}: rank {rank:g} l20 {l20:g} obj {obj:.2f} padm {obj_p:.2f}")
        if rank != 20:
            failures.append(f"rank {rank} at {noise}")
        if abs(l20 - 1000 * noise) > 1:
            failures.append(f"l20 {l20} at {noise}")
        if abs(obj - target) > 0.1:
            failures.append(f"objective {obj:.3f} vs {target} at {noise}")
        if not obj_p >= obj:
            failures.append(f"partial ADM {obj_p:.3f} < {obj:.3f} at {noise}")
    if total >= 600:
        failures.append(f"runtime {total:.0f}s")
    record(2, "REDU-EXPR optimality table", not failures,
           "; ".join(details) + f"; total {total:.1f}s" + (f"; {failures}" if failures else ""))


def test_c3_clustering_accuracy_ordering():
    levels = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
    rep = bench_fig2(levels=levels, seeds=range(10))
    failures, details = [], []
    for level in levels:
        redu = rep.values("accuracy", param=f"noise={level:g};method=redu-expr", aggregate=True)[0]
        padm = rep.values("accuracy", param=f"noise={level:g};method=partial-adm",
                          aggregate=True)[0]
        details.append(f"{level:g}: {redu:.3f} vs {padm:.3f}")
        if level == 0.0 and redu != 1.0:
            failures.append(f"REDU-EXPR accuracy {redu} at 0%")
        if level > 0 and not redu >= padm:
            failures.append(f"ordering at {level:g}")
    record(3, "clustering accuracy ordering", not failures,
           "REDU-EXPR vs partial ADM mean accuracy " + ", ".join(details)
           + (f"; {failures}" if failures else ""))


def _scaling_data(size, seed=0):
    data = generate_subspace_data(SyntheticSpec(size, 5, 4, size // 5, seed))
    return corrupt(data, CorruptionSpec("columnwise_scaled_gaussian", 0.05, seed=seed + 1)).X


def _best_time(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_c4_filtering_scaling():
    cfg = FilteringConfig(rank=20, oversample=10)
    times = {}
    for size in (1000, 2000, 4000):
        X = _scaling_data(size)
        times[size] = _best_time(lambda: fast_rlrr(X, cfg), 3)
        if size == 2000:
            t_padm = _best_time(lambda: solve_rlrr_partial_adm(X), 1)
        del X
    ratios = [times[2000] / times[1000], times[4000] / times[2000]]
    speedup = t_padm / times[2000]
    ok = max(ratios) <= 2.5 and speedup >= 10
    record(4, "filtering scaling", ok,
           f"fast_rlrr times {', '.join(f'{k}: {v:.3f}s' for k, v in times.items())}; "
           f"doubling ratios {ratios[0]:.2f}, {ratios[1]:.2f} (need <= 2.5); "
           f"partial ADM at 2000 {t_padm:.2f}s, speed-up {speedup:.1f}x (need >= 10)")


def _invalid_rejections(A, rng):
    svd = skinny_svd(A)
    r = svd.rank
    relaxed_cases = {
        "What symmetric": np.triu(np.full((r, r), 0.1)) + 0.5 * np.eye(r),
        "What >= 0": -0.5 * np.eye(r),
        "I - What >= 0": 1.5 * np.eye(r),
    }
    original_cases = {
        "Wtilde^2 = Wtilde": LatLrrSolutionParams("original", Wtilde=2 * np.eye(r)),
        "V_A^T S1 = 0": LatLrrSolutionParams("original", Wtilde=np.eye(r), S1=svd.V),
        "S2 U_A = 0": LatLrrSolutionParams("original", Wtilde=np.zeros((r, r)), S2=svd.U.T),
    }
    names = []
    for condition, W in relaxed_cases.items():
        try:
            relaxed_latlrr_solutions(A, W)
        except InvalidParameterError as exc:
            names.append(exc.condition == condition)
        else:
            names.append(False)
    for condition, params in original_cases.items():
        try:
            original_latlrr_solutions(A, params)
        except InvalidParameterError as exc:
            names.append(exc.condition == condition)
        else:
            names.append(False)
    return all(names)


def test_c5_closed_form_families():
    rng = np.random.default_rng(2024)
    worst_res, rank_fail, nuc_err, reject_ok = 0.0, 0, 0.0, True
    for _ in range(100):
        A = rng.standard_normal((8, 4)) @ rng.standard_normal((4, 10))
        scale = np.linalg.norm(A)
        Z, L = original_latlrr_solutions(A, random_original_params(A, rng))
        worst_res = max(worst_res, np.linalg.norm(A - A @ Z - L @ A) / scale)
        rank_fail += representation_rank(Z) + representation_rank(L) != numerical_rank(A)
        Z, L = relaxed_latlrr_solutions(A, random_relaxed_params(A, rng).What)
        worst_res = max(worst_res, np.linalg.norm(A - A @ Z - L @ A) / scale)
        nuc_err = max(nuc_err, abs(norm(Z, "nuclear") + norm(L, "nuclear") - numerical_rank(A)))
        reject_ok &= _invalid_rejections(A, rng)
    ok = worst_res < 1e-8 and rank_fail == 0 and nuc_err <= 1e-6 and reject_ok
    record(5, "closed-form solution families", ok,
           f"max residual {worst_res:.2e} (< 1e-8), rank-sum failures {rank_fail}/100, "
           f"max nuclear-sum error {nuc_err:.2e} (<= 1e-6), invalid rejected by name {reject_ok}")


def _instance(k, rng):
    # even k: outlier columns and l2,1 R-PCA; odd k: sparse spikes and PCP
    m, n, r = 60, 60, 3
    A0 = rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
    X = A0.copy()
    if k % 2 == 0:
        cols = rng.choice(n, 4, replace=False)
        X[:, cols] += 3 * rng.standard_normal((m, 4))
        return X, solve_rpca_l21(X, SolverOptions(tol=1e-9)), "l20"
    idx = rng.choice(m * n, m * n // 20, replace=False)
    X.flat[idx] += rng.choice([-1.0, 1.0], idx.size)
    return X, solve_rpca_l1(X, SolverOptions(tol=1e-9)), "l0"


MODELS4 = ("rlrr_original", "rlrr_relaxed", "latlrr_original", "latlrr_relaxed")


def _params_for(model, A, rng):
    if model == "rlrr_original":
        svd = skinny_svd(A)
        N = np.linalg.svd(svd.V.T)[2][svd.rank:].T
        return {"S": N @ rng.standard_normal((N.shape[1], svd.rank))}
    if model == "latlrr_original":
        return {"params": random_original_params(A, rng)}
    if model == "latlrr_relaxed":
        return {"params": random_relaxed_params(A, rng)}
    return {}


def _express(model, X, rp, kw):
    if model.startswith("rlrr"):
        return redu_expr_rlrr(X, rp, relaxed=model == "rlrr_relaxed", **kw)
    return redu_expr_latlrr(X, rp, kw.get("params"))


def _distance(a, b):
    d = np.abs(a.Z - b.Z).max()
    if hasattr(a, "L"):
        d = max(d, np.abs(a.L - b.L).max())
    return max(d, np.abs(a.E - b.E).max())


def test_c6_mutual_expressibility():
    rng = np.random.default_rng(7)
    obj_mismatch, worst_trip = [], 0.0
    for k in range(20):
        X, rp, f = _instance(k, rng)
        lam = rp.lam
        expected = numerical_rank(rp.A) + lam * norm(rp.E, f)
        for model in ("rpca", "rlrr_original", "latlrr_original"):
            sol = rp if model == "rpca" else _express(model, X, rp, _params_for(model, rp.A, rng))
            if model_objective(model, sol, lam, f) != expected:
                obj_mismatch.append((k, model))
        for model in ("rlrr_relaxed", "latlrr_relaxed"):
            sol = _express(model, X, rp, _params_for(model, rp.A, rng))
            # nuclear norms of projector-type matrices carry roundoff
            if abs(model_objective(model, sol, lam, f) - expected) > 1e-9:
                obj_mismatch.append((k, model))
        for source in MODELS4:
            kw = _params_for(source, rp.A, rng)
            sol = _express(source, X, rp, kw)
            worst_trip = max(worst_trip, _distance(cross_express(sol, source, source, X), sol))
            for target in MODELS4 + ("rpca",):
                mid = cross_express(sol, source, target, X)
                back = cross_express(mid, target, source, X, **kw)
                worst_trip = max(worst_trip, _distance(back, sol))
    ok = not obj_mismatch and worst_trip <= 1e-9
    record(6, "mutual expressibility", ok,
           f"objective mismatches {obj_mismatch or 'none'} over 20 instances x 5 models; "
           f"max round-trip deviation {worst_trip:.2e} (<= 1e-9)")


def test_c7_frobenius_closed_form():
    rng = np.random.default_rng(11)
    rank_fail, worst = 0, 0.0
    for _ in range(50):
        X = rng.standard_normal((20, 20))
        lam = 10 ** rng.uniform(-2, 2)
        A, Z, r = solve_rlrr_frobenius(X, lam)
        s = np.linalg.svd(X, compute_uv=False)
        costs = [k + lam * sum(s[i] ** 2 for i in range(k, s.size)) for k in range(s.size + 1)]
        rank_fail += r != int(np.argmin(costs))
        worst = max(worst, np.abs(A @ Z - A).max())
    ok = rank_fail == 0 and worst <= 1e-9
    record(7, "Frobenius closed form", ok,
           f"rank mismatches vs enumeration {rank_fail}/50, max |AZ - A| {worst:.2e} (<= 1e-9)")


def test_c8_pcp_exact_recovery():
    errors, times = [], []
    for seed in range(10):
        rng = np.random.default_rng(seed)
        A0 = rng.standard_normal((200, 5)) @ rng.standard_normal((5, 200))
        E0 = np.zeros_like(A0)
        idx = rng.choice(A0.size, A0.size // 20, replace=False)
        E0.flat[idx] = rng.choice([-1.0, 1.0], idx.size)
        t0 = time.perf_counter()
        sol = solve_rpca_l1(A0 + E0, SolverOptions(lam=1 / math.sqrt(200)))
        times.append(time.perf_counter() - t0)
        errors.append(np.linalg.norm(sol.A - A0) / np.linalg.norm(A0))
    good = sum(e <= 1e-5 for e in errors)
    ok = good >= 9 and max(times) < 30
    record(8, "PCP exact recovery", ok,
           f"relative error <= 1e-5 in {good}/10 seeds (max {max(errors):.2e}), "
           f"max time {max(times):.2f}s")


def test_c9_filtering_matches_full_solve():
    diffs = []
    for seed in range(10):
        data = generate_subspace_data(SyntheticSpec(100, 1, 5, 400, seed))
        X = corrupt(data, CorruptionSpec("columnwise_gaussian", 0.1, seed=seed + 1)).X
        full = redu_expr_rlrr(X, solve_rpca_l21(X))
        fast = fast_rlrr(X, FilteringConfig(rank=5, oversample=10, seed=seed))
        diffs.append(float(np.abs(full.Z - fast.Z).max()))
    ok = max(diffs) <= 1e-5
    record(9, "filtering vs full solve", ok,
           f"max |Z_fast - Z_full| per seed {[f'{d:.1e}' for d in diffs]} (need <= 1e-5)")
