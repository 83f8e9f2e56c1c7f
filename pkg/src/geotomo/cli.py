"""Command line interface.

Subcommands mirror the library surface: the three reconstruction
pipelines on measurement CSVs, the Monte Carlo sweep runner, and the
power-law rate fitter.  Exit codes: 0 success, 2 invalid input, 3 solver
non-convergence, 4 I/O failure.
"""

import argparse
import csv
import json
import os
import sys

from .algorithms import (
    MeasurementSet,
    load_measurements,
    noisy_bright_lsq,
    noisy_rose_lsq,
    noisy_support_lsq,
)
from .bodies import AtomicMeasure, VPolytope, body_from_payload, body_payload, load_body
from .errors import ConvergenceError, GeotomoError, InvalidInputError
from .harness import (
    METRICS,
    ExperimentConfig,
    emit_csv,
    emit_svg,
    fit_rate,
    load_table,
    reference_bodies,
    run_experiment,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NONCONVERGED = 3
EXIT_IO = 4

_PIPELINE_OF_COMMAND = {
    "reconstruct-support": "support",
    "reconstruct-brightness": "brightness",
    "estimate-rose": "rose",
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="geotomo",
        description="Reconstruct convex bodies and directional measures from noisy data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for command in _PIPELINE_OF_COMMAND:
        p = sub.add_parser(command, help=f"run the {_PIPELINE_OF_COMMAND[command]} pipeline")
        p.add_argument("--input", required=True, help="measurement CSV (u_1,..,u_n,value)")
        p.add_argument("--meta", help="metadata sidecar JSON (default <input>.meta.json)")
        p.add_argument("--out", required=True, help="result JSON path")
        p.add_argument("--seed", type=int, help="override the recorded noise seed metadata")
        p.add_argument(
            "--diagnostics", action="store_true", help="include solver diagnostics in the output"
        )

    p = sub.add_parser("montecarlo", help="run a Monte Carlo sweep experiment")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--out-dir", required=True, help="directory for errors.csv/errors.svg/fits.csv")
    p.add_argument("--seed", type=int, help="override the config's base seed")
    p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")

    p = sub.add_parser("fit-rates", help="fit a power law to an error table")
    p.add_argument("--table", required=True, help="error-table CSV from montecarlo")
    p.add_argument("--which", choices=("mean", "max"), default="mean")
    p.add_argument("--metric", help="metric column (default: first in the table)")
    p.add_argument("--out", help="optionally write the fit as CSV")
    return parser


def _cmd_reconstruct(args):
    expected = _PIPELINE_OF_COMMAND[args.command]
    ms = load_measurements(args.input, args.meta, default_kind=expected)
    if ms.kind != expected:
        raise InvalidInputError(
            f"measurement kind {ms.kind!r} does not match {args.command}"
        )
    if args.seed is not None:
        ms = MeasurementSet(ms.dirs, ms.values, ms.noise_sigma, args.seed, ms.kind)

    result = {
        "pipeline": expected,
        "dims": ms.dims,
        "measurements": len(ms),
        "sigma": ms.noise_sigma,
        "seed": ms.seed,
    }
    if expected == "support":
        report = noisy_support_lsq(ms)
        result["body"] = body_payload(report.output)
    elif expected == "brightness":
        report = noisy_bright_lsq(ms)
        fit = report.output
        result["zonotope"] = body_payload(fit.zonotope)
        result["surface_measure"] = body_payload(fit.surface_measure)
        result["body"] = body_payload(fit.polytope) if fit.polytope is not None else None
    else:
        report = noisy_rose_lsq(ms)
        result["measure"] = body_payload(report.output)
    result["residual"] = float(report.residual)
    result["wall_time"] = float(report.wall_time)
    result["flags"] = list(report.flags)
    if args.diagnostics and report.diagnostics is not None:
        result["diagnostics"] = report.diagnostics.to_dict()
    try:
        with open(args.out, "w") as fh:
            json.dump(result, fh, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


def _sweep_values(spec):
    if not isinstance(spec, dict) or "var" not in spec:
        raise InvalidInputError("config sweep must be an object with 'var'")
    var = spec["var"]
    if "values" in spec:
        return var, tuple(float(v) for v in spec["values"])
    try:
        start, stop, step = float(spec["start"]), float(spec["stop"]), float(spec["step"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError("config sweep needs 'values' or start/stop/step") from exc
    if step <= 0:
        raise InvalidInputError("sweep step must be positive")
    values = []
    v = start
    while v <= stop + 1e-9 * max(1.0, abs(stop)):
        values.append(round(v, 12))
        v = start + step * (len(values))
    return var, tuple(values)


def _resolve_truth(config, pipeline):
    key = "measure" if pipeline == "rose" else "body"
    spec = config.get(key)
    if spec is None:
        raise InvalidInputError(f"config is missing {key!r}")
    if isinstance(spec, str):
        catalog = reference_bodies()
        if spec not in catalog:
            raise InvalidInputError(
                f"unknown reference body {spec!r}; choose from {sorted(catalog)}"
            )
        truth = catalog[spec]
    elif isinstance(spec, dict) and "file" in spec:
        truth = load_body(spec["file"])
    elif isinstance(spec, dict):
        truth = body_from_payload(spec, context=f"config {key}")
    else:
        raise InvalidInputError(f"config {key!r} must be a name, a payload, or {{'file': path}}")
    if pipeline == "rose":
        if not isinstance(truth, AtomicMeasure):
            raise InvalidInputError("rose experiments need an atomic measure")
    elif not isinstance(truth, VPolytope):
        raise InvalidInputError("body experiments need a vertex polytope")
    return truth


def _cmd_montecarlo(args):
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{args.config}: invalid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise InvalidInputError(f"{args.config}: expected a JSON object")
    pipeline = config.get("pipeline", "support")
    sweep, values = _sweep_values(config.get("sweep"))
    base_seed = args.seed if args.seed is not None else int(config.get("base_seed", 0))
    cfg = ExperimentConfig(
        truth=_resolve_truth(config, pipeline),
        pipeline=pipeline,
        sweep=sweep,
        sweep_values=values,
        k=int(config.get("k", 35)),
        scale=float(config.get("R", 1.0)),
        sigma=float(config.get("sigma", 0.1)),
        iterations=int(config.get("iterations", 300)),
        base_seed=base_seed,
        metrics=tuple(config.get("metrics", ["pseudonorm"])),
    )
    table = run_experiment(cfg, threads=max(1, args.threads))

    os.makedirs(args.out_dir, exist_ok=True)
    emit_csv(table, os.path.join(args.out_dir, "errors.csv"))
    emit_svg(table, os.path.join(args.out_dir, "errors.svg"))
    fit_rows = []
    for metric in cfg.metrics:
        for which in ("mean", "max"):
            try:
                fit = fit_rate(table, which=which, metric=metric)
            except InvalidInputError:
                continue
            fit_rows.append(
                [metric, which, repr(fit.exponent), repr(fit.amplitude), repr(fit.r_squared)]
            )
    fits_path = os.path.join(args.out_dir, "fits.csv")
    try:
        with open(fits_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["metric", "which", "exponent", "amplitude", "r_squared"])
            writer.writerows(fit_rows)
    except OSError as exc:
        raise OSError(f"cannot write {fits_path}: {exc}") from exc
    failed = int(table.failures.sum())
    total = len(table.xs) * table.iterations
    print(f"wrote {args.out_dir}/errors.csv, errors.svg, fits.csv ({failed}/{total} iterations failed)")
    return EXIT_OK


def _cmd_fit_rates(args):
    table = load_table(args.table)
    metric = args.metric if args.metric is not None else table.metrics[0]
    if metric not in table.metrics:
        raise InvalidInputError(f"metric {metric!r} not in table columns {table.metrics}")
    fit = fit_rate(table, which=args.which, metric=metric)
    print(
        f"metric={fit.metric} which={fit.which} exponent={fit.exponent!r} "
        f"amplitude={fit.amplitude!r} r_squared={fit.r_squared!r}"
    )
    if args.out:
        emit_csv(fit, args.out)
    return EXIT_OK


def _dispatch(args):
    if args.command in _PIPELINE_OF_COMMAND:
        return _cmd_reconstruct(args)
    if args.command == "montecarlo":
        return _cmd_montecarlo(args)
    if args.command == "fit-rates":
        return _cmd_fit_rates(args)
    raise InvalidInputError(f"unknown command {args.command!r}")


def console_main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ConvergenceError as exc:
        print(f"geotomo: solver did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except json.JSONDecodeError as exc:
        print(f"geotomo: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except GeotomoError as exc:
        print(f"geotomo: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"geotomo: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main():
    sys.exit(console_main())


if __name__ == "__main__":
    main()
