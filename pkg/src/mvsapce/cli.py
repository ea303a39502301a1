"""Command-line front end: fit, predict, uq, benchmark-beam, compare.

Exit codes: 0 success, 2 data error, 3 configuration error, 1 internal
error.  Every invocation ends with one JSON diagnostics line on standard
output; human-readable messages go to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .benchmark import (
    BeamConfig,
    ExperimentPlan,
    plan_hash,
    run_beam_experiment,
    write_experiment_report,
)
from .errors import ConfigError, DataError, MvsaError
from .multi_index import total_degree_set
from .mvsa_engine import MvsaConfig, fit_mvsa, load_model, predict, save_model
from .polynomial_basis import DistributionSpec
from .regression import load_data_csv, load_inputs_csv, write_responses_csv
from .uq import (
    moments,
    sensitivity_report,
    write_generalized_csv,
    write_moments_csv,
    write_sobol_csv,
)


class _Parser(argparse.ArgumentParser):
    # Flag misuse (unknown flags, bad values, missing required flags) is a
    # configuration error under the exit-code contract, not an argparse
    # usage exit.
    def error(self, message):
        raise ConfigError(message)


def _load_spec(path) -> DistributionSpec:
    path = Path(path)
    if not path.exists():
        raise DataError(f"distribution spec file not found: {path}")
    try:
        with path.open(encoding="utf-8") as handle:
            payload = json.load(handle)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None
    return DistributionSpec.from_json(payload)


def _initial_set(token: str, dim: int):
    if token == "zero":
        return None
    if token.startswith("td:"):
        try:
            degree = int(token[3:])
        except ValueError:
            raise ConfigError(f"malformed --init value {token!r}") from None
        return total_degree_set(dim, degree)
    raise ConfigError(f"--init must be 'zero' or 'td:<p>', got {token!r}")


def _int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part != "")
    except ValueError:
        raise ConfigError(f"{flag} expects comma-separated integers, got {text!r}") from None


def _cmd_fit(args) -> dict:
    spec = _load_spec(args.dist)
    if spec.dim != args.inputs:
        raise DataError(
            f"--inputs {args.inputs} does not match distribution spec with {spec.dim} marginals"
        )
    config = MvsaConfig(
        kappa=args.kappa,
        initial_set=_initial_set(args.init, spec.dim),
    )
    data = load_data_csv(args.data, args.inputs, args.outputs)
    started = time.perf_counter()
    model = fit_mvsa(data, spec, config)
    fit_seconds = time.perf_counter() - started
    save_model(model, args.out)
    diag = model.diagnostics
    return {
        "command": "fit",
        "model": str(args.out),
        "basis_size": diag.basis_size,
        "oversampling_ratio": data.n_samples / diag.basis_size,
        "condition_number": diag.condition_number,
        "max_total_degree": diag.max_total_degree,
        "max_univariate_degree": diag.max_univariate_degree,
        "iterations": diag.iterations,
        "pruned_count": diag.pruned_count,
        "fit_seconds": fit_seconds,
        "seed": args.seed,
    }


def _cmd_predict(args) -> dict:
    model = load_model(args.model)
    inputs = load_inputs_csv(args.data, model.spec.dim)
    outputs = predict(model, inputs)
    write_responses_csv(args.out, outputs)
    return {
        "command": "predict",
        "rows": int(inputs.shape[0]),
        "outputs": model.n_outputs,
        "out": str(args.out),
    }


def _cmd_uq(args) -> dict:
    model = load_model(args.model)
    moment_report = moments(model)
    sens = sensitivity_report(model)
    prefix = str(args.out_prefix)
    parent = Path(prefix).parent
    if str(parent):
        parent.mkdir(parents=True, exist_ok=True)
    files = {
        "moments": prefix + "moments.csv",
        "sobol": prefix + "sobol.csv",
        "generalized": prefix + "generalized.csv",
    }
    write_moments_csv(moment_report, files["moments"])
    write_sobol_csv(sens, files["sobol"])
    write_generalized_csv(sens, files["generalized"])
    return {
        "command": "uq",
        "files": files,
        "outputs": model.n_outputs,
        "zero_variance_outputs": int(sens.zero_variance_outputs.sum()),
        "generalized_defined": sens.generalized_defined,
        "constant_term_present": moment_report.constant_term_present,
    }


def _cmd_benchmark(args, command: str) -> dict:
    config = BeamConfig(response_dim=args.M, dummy_count=args.dummy_count)
    plan = ExperimentPlan(
        training_sizes=_int_list(args.Q, "--Q"),
        test_size=args.test_size,
        seeds=_int_list(args.seeds, "--seeds"),
        methods=tuple(part for part in args.methods.split(",") if part),
        kappa=args.kappa,
        mcs_samples=args.mcs_samples,
        mcs_seed=args.mcs_seed,
    )
    report = run_beam_experiment(config, plan)
    files = write_experiment_report(report, args.out_dir)
    return {
        "command": command,
        "plan_hash": plan_hash(config, plan),
        "cells": len(report.cells),
        "failures": sum(1 for c in report.cells if not c.ok),
        "files": files,
    }


def _add_benchmark_flags(parser, default_methods: str) -> None:
    parser.add_argument("--Q", required=True, help="comma-separated training sizes")
    parser.add_argument("--M", type=int, default=1000, help="response dimension")
    parser.add_argument("--seeds", required=True, help="comma-separated seed list")
    parser.add_argument("--methods", default=default_methods, help="comma-separated methods (mvsa, td:<p>)")
    parser.add_argument("--out-dir", required=True, help="directory for the report files")
    parser.add_argument("--test-size", type=int, default=1000)
    parser.add_argument("--mcs-samples", type=int, default=100_000)
    parser.add_argument("--mcs-seed", type=int, default=123456789)
    parser.add_argument("--kappa", type=float, default=100.0)
    parser.add_argument("--dummy-count", type=int, default=15)


def build_parser() -> _Parser:
    parser = _Parser(prog="mvsapce", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    fit = sub.add_parser("fit", help="fit an adaptive expansion from a CSV data file")
    fit.add_argument("--data", required=True, help="training CSV with header x1..xN,y1..yM")
    fit.add_argument("--inputs", type=int, required=True, help="number of input columns N")
    fit.add_argument("--outputs", type=int, required=True, help="number of output columns M")
    fit.add_argument("--dist", required=True, help="distribution spec JSON file")
    fit.add_argument("--kappa", type=float, default=100.0)
    fit.add_argument("--init", default="zero", help="initial basis: zero or td:<p>")
    fit.add_argument("--out", required=True, help="output model JSON path")
    fit.add_argument("--seed", type=int, default=None, help="recorded in diagnostics; fitting is deterministic")
    fit.set_defaults(handler=_cmd_fit)

    pred = sub.add_parser("predict", help="evaluate a fitted model on new inputs")
    pred.add_argument("--model", required=True)
    pred.add_argument("--data", required=True, help="CSV with columns x1..xN (y columns ignored)")
    pred.add_argument("--out", required=True, help="output CSV with columns y1..yM")
    pred.set_defaults(handler=_cmd_predict)

    uq = sub.add_parser("uq", help="moments and sensitivity reports for a fitted model")
    uq.add_argument("--model", required=True)
    uq.add_argument("--out-prefix", required=True, help="prefix for moments/sobol/generalized CSVs")
    uq.set_defaults(handler=_cmd_uq)

    bench = sub.add_parser("benchmark-beam", help="run the beam benchmark protocol")
    _add_benchmark_flags(bench, default_methods="mvsa")
    bench.set_defaults(handler=lambda args: _cmd_benchmark(args, "benchmark-beam"))

    compare = sub.add_parser("compare", help="compare adaptive and total-degree fits on the beam case")
    _add_benchmark_flags(compare, default_methods="mvsa,td:2,td:3")
    compare.set_defaults(handler=lambda args: _cmd_benchmark(args, "compare"))

    return parser


def _fail(kind: str, exc: Exception, code: int) -> int:
    print(f"mvsapce: {kind}: {exc}", file=sys.stderr)
    print(json.dumps({"status": "error", "kind": kind, "error": str(exc), "exit_code": code}))
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        payload = args.handler(args)
    except DataError as exc:
        return _fail("data error", exc, 2)
    except ConfigError as exc:
        return _fail("configuration error", exc, 3)
    except MvsaError as exc:
        return _fail("error", exc, 1)
    except SystemExit:
        raise
    except Exception as exc:  # internal error, but keep the diagnostic contract
        return _fail("internal error", exc, 1)
    print(json.dumps({"status": "ok", **payload}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
