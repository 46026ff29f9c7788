"""Command-line interface.

Exit status: 0 on success, 1 on a usage or input error (including malformed
CSV), 2 on a numerical failure or when a solver stops before converging.
"""

import argparse
import logging
import sys

import numpy as np

from . import bench
from .closed_forms import redu_expr_latlrr, redu_expr_rlrr
from .evaluation import (CORRUPTION_MODES, CorruptionSpec, SyntheticSpec, clustering_accuracy,
                         corrupt, generate_subspace_data, spectral_cluster)
from .exceptions import (InvalidInputError, InvalidParameterError, MatrixParseError,
                         SeedDeficientError, UsageError)
from .filtering import FilteringConfig, fast_rlrr, l1_filter, l21_filter
from .io import read_labels, read_matrix_csv, write_labels, write_matrix_csv
from .rpca import SolverOptions, solve_rlrr_partial_adm, solve_rpca_l1, solve_rpca_l21

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2
METHODS = ("redu-expr", "partial-adm", "filtering")


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad arguments; route them to status 1
    def error(self, message):
        raise UsageError(message)


def _lambda(text):
    if text == "auto":
        return "auto"
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("lambda must be positive")
    return value


def _rank(text):
    if text == "auto":
        return "auto"
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("rank must be positive")
    return value


def _solver_args(p):
    p.add_argument("--lambda", dest="lam", type=_lambda, default="auto",
                   help="noise weight, a positive real or 'auto' (default)")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--rho", type=float, default=1.5)
    p.add_argument("--seed", type=int, default=0)


def _filter_args(p):
    p.add_argument("--rank", type=_rank, default="auto")
    p.add_argument("--oversample", type=float, default=10.0)


def _options(args):
    return SolverOptions(lam=args.lam, rho=args.rho, tol=args.tol, max_iter=args.max_iter,
                         seed=args.seed)


def _filter_config(args):
    return FilteringConfig(rank=args.rank, oversample=args.oversample, seed=args.seed,
                           solver=_options(args))


def _write(M, path):
    if path:
        write_matrix_csv(M, path)


def _status(converged):
    if not converged:
        logger.error("solver reached --max-iter before converging")
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_rpca(args):
    X = read_matrix_csv(args.input)
    solve = solve_rpca_l1 if args.norm == "l1" else solve_rpca_l21
    sol = solve(X, _options(args))
    _write(sol.A, args.out_A)
    _write(sol.E, args.out_E)
    print(f"rank={sol.svd.rank} iterations={sol.iterations} objective={sol.objective:.6g}")
    return _status(sol.converged)


def cmd_filter(args):
    X = read_matrix_csv(args.input)
    sol = (l1_filter if args.norm == "l1" else l21_filter)(X, _filter_config(args))
    _write(sol.A, args.out_A)
    _write(sol.E, args.out_E)
    print(f"seed_iterations={sol.iterations} objective={sol.objective:.6g}")
    return _status(sol.converged)


def _rlrr(X, args):
    if args.method == "redu-expr":
        return redu_expr_rlrr(X, solve_rpca_l21(X, _options(args)))
    if args.method == "partial-adm":
        return solve_rlrr_partial_adm(X, _options(args))
    return fast_rlrr(X, _filter_config(args))


def cmd_rlrr(args):
    X = read_matrix_csv(args.input)
    sol = _rlrr(X, args)
    _write(sol.Z, args.out_Z)
    _write(sol.E, args.out_E)
    print(f"method={args.method} iterations={sol.iterations}")
    return _status(sol.converged)


def cmd_latlrr(args):
    X = read_matrix_csv(args.input)
    solve = solve_rpca_l1 if args.norm == "l1" else solve_rpca_l21
    rpca = solve(X, _options(args))
    sol = redu_expr_latlrr(X, rpca)
    _write(sol.Z, args.out_Z)
    _write(sol.L, args.out_L)
    _write(sol.E, args.out_E)
    print(f"iterations={rpca.iterations}")
    return _status(rpca.converged)


def cmd_synth(args):
    data = generate_subspace_data(SyntheticSpec(args.ambient, args.subspaces, args.dim,
                                                args.points, args.seed))
    if args.fraction > 0:
        data = corrupt(data, CorruptionSpec(args.corruption, args.fraction, args.magnitude,
                                            seed=args.seed + 1, replace=args.replace))
    write_matrix_csv(data.X, args.out)
    if args.out_labels:
        write_labels(data.labels, args.out_labels)
    if args.out_noise:
        write_labels(data.noise_indices, args.out_noise)
    return EXIT_OK


def cmd_cluster(args):
    X = read_matrix_csv(args.input)
    sol = _rlrr(X, args)
    labels = spectral_cluster(sol.Z, args.k, seed=args.seed)
    if args.out:
        write_labels(labels, args.out)
    else:
        print("\n".join(str(int(v)) for v in labels))
    if args.truth:
        truth = read_labels(args.truth)
        print(f"accuracy={clustering_accuracy(labels, truth):.4f}", file=sys.stderr)
    return _status(sol.converged)


def cmd_bench(args):
    opts = SolverOptions(tol=args.tol, max_iter=args.max_iter, rho=args.rho)
    seeds = range(args.seed, args.seed + args.seeds)
    if args.experiment == "table2":
        report = bench.bench_table2(tuple(args.D), seeds, replace=args.replace, opts=opts)
    elif args.experiment == "table4":
        report = bench.bench_table4(tuple(args.noise), seeds, methods=tuple(args.methods),
                                    opts=opts)
    elif args.experiment == "fig2":
        report = bench.bench_fig2(tuple(args.noise), seeds, ambient=args.ambient,
                                  points=args.points, methods=tuple(args.methods), opts=opts)
    else:
        report = bench.bench_scaling(tuple(args.sizes), methods=tuple(args.methods),
                                     seeds=seeds, rank=args.rank, oversample=args.oversample,
                                     opts=opts)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            report.to_csv(fh)
    else:
        sys.stdout.write(report.to_csv())
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="subspace-recovery",
                     description="Robust PCA, robust LRR/LatLRR and l2,1 filtering.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rpca", help="robust PCA X = A + E")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--norm", choices=("l1", "l21"), default="l1")
    _solver_args(p)
    p.add_argument("--out-A", dest="out_A")
    p.add_argument("--out-E", dest="out_E")
    p.set_defaults(func=cmd_rpca)

    p = sub.add_parser("filter", help="robust PCA by randomized filtering")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--norm", choices=("l1", "l21"), default="l21")
    _solver_args(p)
    _filter_args(p)
    p.add_argument("--out-A", dest="out_A")
    p.add_argument("--out-E", dest="out_E")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("rlrr", help="relaxed robust LRR")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--method", choices=METHODS, default="redu-expr")
    _solver_args(p)
    _filter_args(p)
    p.add_argument("--out-Z", dest="out_Z")
    p.add_argument("--out-E", dest="out_E")
    p.set_defaults(func=cmd_rlrr)

    p = sub.add_parser("latlrr", help="relaxed robust LatLRR via one robust PCA solve")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--norm", choices=("l1", "l21"), default="l21")
    _solver_args(p)
    p.add_argument("--out-Z", dest="out_Z")
    p.add_argument("--out-L", dest="out_L")
    p.add_argument("--out-E", dest="out_E")
    p.set_defaults(func=cmd_latlrr)

    p = sub.add_parser("synth", help="sample corrupted union-of-subspaces data")
    p.add_argument("--ambient", type=int, default=100)
    p.add_argument("--subspaces", type=int, default=5)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--corruption", choices=CORRUPTION_MODES, default="columnwise_gaussian")
    p.add_argument("--fraction", type=float, default=0.0)
    p.add_argument("--magnitude", type=float)
    p.add_argument("--replace", action="store_true",
                   help="overwrite corrupted columns instead of adding noise")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--out-labels")
    p.add_argument("--out-noise", help="write corrupted column indices")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("cluster", help="subspace clustering of the columns of X")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=METHODS, default="redu-expr")
    _solver_args(p)
    _filter_args(p)
    p.add_argument("--out")
    p.add_argument("--truth", help="ground-truth labels; prints accuracy to stderr")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("bench", help="synthetic experiments, CSV report")
    p.add_argument("experiment", choices=("table2", "table4", "fig2", "scaling"))
    p.add_argument("--seeds", type=int, default=None, help="number of seeds")
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--D", type=int, nargs="+", default=[5, 10])
    p.add_argument("--replace", action="store_true")
    p.add_argument("--noise", type=float, nargs="+", default=None)
    p.add_argument("--methods", nargs="+", choices=METHODS, default=None)
    p.add_argument("--ambient", type=int, default=200)
    p.add_argument("--points", type=int, default=40)
    p.add_argument("--sizes", type=int, nargs="+", default=[250, 500, 1000, 2000])
    p.add_argument("--rank", type=int, default=20)
    p.add_argument("--oversample", type=float, default=10.0)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--rho", type=float, default=1.5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


_BENCH_DEFAULTS = {
    "table2": {"seeds": 10, "methods": ["redu-expr"]},
    "table4": {"seeds": 1, "noise": [0.0, 0.1, 0.2, 0.3], "methods": ["redu-expr", "partial-adm"]},
    "fig2": {"seeds": 10, "noise": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
             "methods": ["redu-expr", "partial-adm"]},
    "scaling": {"seeds": 1, "methods": list(METHODS)},
}


def cli_main(argv=None):
    """Run the command line; returns the exit status instead of exiting."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "bench":
        for key, value in _BENCH_DEFAULTS[args.experiment].items():
            if getattr(args, key, None) is None:
                setattr(args, key, value)
    try:
        return args.func(args)
    except (MatrixParseError, InvalidInputError, InvalidParameterError, UsageError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SeedDeficientError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
