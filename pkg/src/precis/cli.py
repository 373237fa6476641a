"""Command-line interface.

Exit codes: 0 success, 2 input or configuration error, 3 numerical or
estimator failure.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import io as pio
from .estimators import METHODS, EstimatorConfig, fit
from .exceptions import InputValidationError, PrecisError
from .linalg import as_sample_data, sample_covariance
from .metrics import evaluate, sparsity
from .network import betweenness_weighted, edge_list, hub_report, partial_correlation, to_graph
from .synthetic import (AGGREGATE_COLUMNS, REPLICATE_COLUMNS, TIMING_COLUMNS, SimConfig,
                        default_workers, run_replicates)
from .tuning import CvConfig, GridSpec, cross_validate, method_grid

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _input_error(msg):
    return CliError(msg, EXIT_INPUT)


def cmd_estimate(args):
    try:
        X = as_sample_data(pio.read_data_csv(args.data))
    except InputValidationError as exc:
        raise _input_error(f"{args.data}: {exc}") from None
    if args.method == "elnet" and args.lambda_ is not None and args.gamma is None:
        raise _input_error("--gamma is required for elnet when --lambda is given")
    elnet = args.method == "elnet"
    # gamma is tuned-over for elnet, a fixed override for the other methods
    cfg = EstimatorConfig(gamma=None if elnet else args.gamma)
    cv_summary = None
    t0 = time.perf_counter()
    try:
        S = sample_covariance(X)
        if args.lambda_ is None:
            grid = method_grid(X, args.method, GridSpec(n_points=args.grid_points), S=S)
            if elnet and args.gamma is not None:
                grid = [(lam, args.gamma) for lam in dict.fromkeys(c[0] for c in grid)]
            cv = cross_validate(X, args.method, grid, CvConfig(k=args.cv_folds, seed=args.seed), cfg)
            lam, gamma = cv.selected
            cv_summary = cv.to_json()
        else:
            lam, gamma = args.lambda_, (args.gamma if elnet else None)
        est = fit(args.method, X, lam, gamma, cfg, S=S)
    except InputValidationError as exc:
        raise _input_error(f"{args.method}: {exc}") from None
    except (PrecisError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise CliError(f"{args.method} failed: {exc}", EXIT_NUMERIC) from None
    runtime = time.perf_counter() - t0
    summary = {
        "method": est.method,
        "lambda": est.lambda_used,
        "gamma": est.gamma_used,
        "converged": bool(est.converged),
        "sparsity": sparsity(est.omega),
        "runtime": runtime,
        "iterations": int(est.iterations),
        "objective": est.objective,
    }
    if cv_summary is not None:
        summary["cv"] = cv_summary
    pio.write_matrix_csv(os.path.join(args.out_dir, "precision.csv"), est.omega)
    pio.write_json(os.path.join(args.out_dir, "summary.json"), summary)
    print(pio.json_text({k: v for k, v in summary.items() if k != "cv"}), end="")


def _load_sim_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise _input_error(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise _input_error(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from None
    try:
        return SimConfig.from_dict(data)
    except InputValidationError as exc:
        raise _input_error(f"{path}: {exc}") from None


def cmd_simulate(args):
    config = _load_sim_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    workers = args.workers or default_workers()
    out = args.out_dir
    stream = pio.StreamingCsv(os.path.join(out, "replicates.csv"), REPLICATE_COLUMNS)
    try:
        results, table = run_replicates(
            config, workers=workers, on_replicate=lambda batch: stream.write([r.row() for r in batch])
        )
    except InputValidationError as exc:
        stream.abort()
        raise _input_error(str(exc)) from None
    except (PrecisError, ArithmeticError) as exc:
        stream.abort()
        raise CliError(f"simulation failed: {exc}", EXIT_NUMERIC) from None
    except BaseException:
        stream.abort()
        raise
    stream.close()
    pio.write_rows_csv(os.path.join(out, "timings.csv"), TIMING_COLUMNS, [r.timing_row() for r in results])
    pio.write_rows_csv(os.path.join(out, "aggregate.csv"), AGGREGATE_COLUMNS, table)
    pio.write_json(os.path.join(out, "aggregate.json"), table)
    print(pio.rows_csv_text(AGGREGATE_COLUMNS, table), end="")


def cmd_compare(args):
    try:
        truth = pio.read_matrix_csv(args.truth)
        est = pio.read_matrix_csv(args.estimate)
        report = evaluate(truth, est)
    except InputValidationError as exc:
        raise _input_error(str(exc)) from None
    except ArithmeticError as exc:
        raise _input_error(f"truth matrix is not positive definite: {exc}") from None
    text = pio.json_text(report.to_json())
    if args.out_dir:
        pio.write_json(os.path.join(args.out_dir, "metrics.json"), report.to_json())
    print(text, end="")


def cmd_network(args):
    try:
        omega = pio.read_matrix_csv(args.precision)
        rho = partial_correlation(omega)
    except InputValidationError as exc:
        raise _input_error(str(exc)) from None
    graph = to_graph(rho)
    report = hub_report(betweenness_weighted(graph), args.z_threshold)
    export = to_graph(rho, sqrt_transform=True) if args.sqrt_transform else graph
    rows = [{"i": i, "j": j, "weight": w} for i, j, w in edge_list(export)]
    pio.write_json(os.path.join(args.out_dir, "hubs.json"), report.to_json())
    pio.write_rows_csv(os.path.join(args.out_dir, "edges.csv"), ["i", "j", "weight"], rows)
    pio.write_matrix_csv(os.path.join(args.out_dir, "graph.csv"), export)
    print(pio.json_text({"hub_count": report.hub_count, "hubs": report.hubs, "edges": len(rows)}), end="")


def build_parser():
    parser = argparse.ArgumentParser(prog="precis", description="Sparse precision matrix estimation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate a precision matrix from a data CSV")
    p.add_argument("data", help="n x p CSV, optional header row")
    p.add_argument("--method", choices=METHODS, default="glasso")
    p.add_argument("--lambda", dest="lambda_", type=float, help="penalty; cross-validated if omitted")
    p.add_argument("--gamma", type=float, help="secondary parameter (elnet mixing, or override)")
    p.add_argument("--cv-folds", type=int, default=5)
    p.add_argument("--grid-points", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="run a replicated simulation from a JSON config")
    p.add_argument("config")
    p.add_argument("--seed", type=int, help="override the config master seed")
    p.add_argument("--workers", type=int, help="worker processes (default PRECIS_THREADS or all cores)")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="metrics of an estimate against a true precision matrix")
    p.add_argument("truth")
    p.add_argument("estimate")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("network", help="partial-correlation graph and betweenness hubs")
    p.add_argument("precision")
    p.add_argument("--z-threshold", type=float, default=2.0)
    p.add_argument("--sqrt-transform", action="store_true",
                   help="square-root the exported edge weights (hubs are unaffected)")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_network)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CliError as exc:
        print(f"precis {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except InputValidationError as exc:
        print(f"precis {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
