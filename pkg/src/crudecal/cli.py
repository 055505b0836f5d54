"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 data or validation error, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import registry
from .bench import run_benchmark, summarize
from .core import CalibrationError, PredictionSet
from .data import (
    FAMILIES,
    SplitSpec,
    SyntheticConfig,
    is_synthetic_dump,
    load_csv,
    load_synthetic,
    split,
    synth_generate,
    write_csv,
    write_synthetic,
    write_table,
)
from .metrics import DEFAULT_STEPS, calibration_curve, evaluate

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 2, 3, 4

log = logging.getLogger("crudecal")


class UsageError(Exception):
    pass


def _fractions(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad split {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("split needs three comma-separated fractions")
    return parts


def _probability(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= p <= 1:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {p}")
    return p


def _add_split_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--split", type=_fractions, default=(0.5, 0.4, 0.1), help="train,cal,test fractions")
    p.add_argument("--seed", type=int, default=0)


def _add_eval_sources(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="labelled CSV to split into train/cal/test")
    p.add_argument("--trial", type=int, default=0, help="which shuffle of --input to use")
    p.add_argument("--cal", help="calibration CSV (instead of --input)")
    p.add_argument("--test", help="test CSV (instead of --input)")
    p.add_argument("--model", help="fitted model JSON (instead of fitting on the calibration set)")
    p.add_argument("--steps", type=int, default=DEFAULT_STEPS, help="calibration curve steps S")
    _add_split_args(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crudecal", description=__doc__.splitlines()[0])
    parser.add_argument("-q", "--quiet", action="store_true", help="only log warnings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a recalibrator on a calibration CSV")
    p.add_argument("--method", choices=registry.METHODS, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)

    p = sub.add_parser("quantile", help="append calibrated quantiles to a prediction CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--output", required=True)

    p = sub.add_parser("interval", help="append calibrated interval bounds to a prediction CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--p-lower", type=_probability, default=0.05)
    p.add_argument("--p-upper", type=_probability, default=0.95)
    p.add_argument("--output", required=True)

    p = sub.add_parser("evaluate", help="write a calibration/sharpness report per method")
    p.add_argument("--method", "--methods", dest="methods", default="all")
    _add_eval_sources(p)
    p.add_argument("--output", required=True, help="output directory")

    p = sub.add_parser("curve", help="write the calibration curve as p,p_hat CSV")
    p.add_argument("--method", choices=registry.METHODS, required=True)
    _add_eval_sources(p)
    p.add_argument("--output", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--family", choices=FAMILIES, default="gaussian")
    p.add_argument("--param", type=float, action="append", default=[],
                   help="family parameter (lognormal log-scale s, student_t nu)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--homoscedastic", action="store_true", help="constant sigma(x)")
    p.add_argument("--miscal-scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)

    p = sub.add_parser("bench", help="multi-trial benchmark of recalibrators")
    p.add_argument("--input", required=True)
    p.add_argument("--methods", default="all")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    p.add_argument("--model", choices=("oracle", "knn"), default="oracle",
                   help="use the file's mu/sigma (oracle) or fit k-NN on the train split")
    p.add_argument("--k", type=int, default=20)
    _add_split_args(p)
    p.add_argument("--output", required=True, help="output directory")
    return parser


def _split_spec(args, trials: int) -> SplitSpec:
    try:
        return SplitSpec(*args.split, seed=args.seed, trials=trials)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _eval_sets(args) -> tuple[PredictionSet | None, PredictionSet]:
    if args.input:
        if args.cal or args.test:
            raise UsageError("use either --input or --cal/--test, not both")
        spec = _split_spec(args, trials=args.trial + 1)
        _, cal, test = split(load_csv(args.input), spec, args.trial)
        return cal, test
    if not args.test:
        raise UsageError("need --input, or --test with --cal/--model")
    cal = load_csv(args.cal) if args.cal else None
    return cal, load_csv(args.test)


def _recalibrator(method: str, cal, args):
    if args.model:
        return registry.load_model(args.model)
    if cal is None and method != "none":
        raise UsageError(f"method {method} needs --cal, --input or --model")
    return registry.fit(method, cal)


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def cmd_fit(args) -> None:
    model = registry.fit(args.method, load_csv(args.input))
    registry.save_model(args.output, model)
    log.info("wrote %s model to %s", args.method, args.output)


def cmd_quantile(args) -> None:
    model = registry.load_model(args.model)
    data = load_csv(args.input)
    q = np.broadcast_to(model.quantile(data.mu, data.sigma, args.p), data.mu.shape)
    write_csv(args.output, data, {"quantile": q})


def cmd_interval(args) -> None:
    if args.p_lower >= args.p_upper:
        raise UsageError("--p-lower must be below --p-upper")
    model = registry.load_model(args.model)
    data = load_csv(args.input)
    lower = np.broadcast_to(model.quantile(data.mu, data.sigma, args.p_lower), data.mu.shape)
    upper = np.broadcast_to(model.quantile(data.mu, data.sigma, args.p_upper), data.mu.shape)
    if np.any(lower > upper):
        raise AssertionError("interval with lower > upper")
    write_csv(args.output, data, {"lower": lower, "upper": upper})


def cmd_evaluate(args) -> None:
    try:
        methods = registry.parse_methods(args.methods)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.model and len(methods) > 1:
        raise UsageError("--model evaluates a single method")
    cal, test = _eval_sets(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for method in methods:
        recal = _recalibrator(method, cal, args)
        report = evaluate(test, recal, method=method, steps=args.steps, seed=args.seed)
        _write_json(out / f"report_{method}.json", report.to_dict())
        log.info("%s: calibration_rmse=%.4f sharpness=%.4f", method, report.calibration_rmse, report.sharpness)


def cmd_curve(args) -> None:
    cal, test = _eval_sets(args)
    curve = calibration_curve(test, _recalibrator(args.method, cal, args), args.steps)
    write_table(args.output, {"p": curve.expected, "p_hat": curve.observed})


def cmd_synth(args) -> None:
    config = SyntheticConfig(
        n=args.n,
        family=args.family,
        family_params=tuple(args.param),
        hetero=not args.homoscedastic,
        miscal_scale=args.miscal_scale,
        seed=args.seed,
    )
    write_synthetic(args.output, synth_generate(config))
    log.info("wrote %d %s rows to %s", args.n, args.family, args.output)


def cmd_bench(args) -> None:
    try:
        methods = registry.parse_methods(args.methods)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    spec = _split_spec(args, trials=args.trials)
    data = load_synthetic(args.input) if is_synthetic_dump(args.input) else load_csv(args.input)
    results = run_benchmark(data, methods, spec, steps=args.steps, model=args.model, k=args.k)

    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    summary = summarize(results)
    with open(out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(summary[0]), lineterminator="\n")
        writer.writeheader()
        for row in summary:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    _write_json(out / "reports.json", [{"trial": r.trial, **r.report.to_dict()} for r in results])
    with open(out / "trials.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["trial", "method", "calibration_rmse", "sharpness", "coverage_90", "width_90"])
        for r in results:
            writer.writerow([r.trial, r.method, repr(r.report.calibration_rmse), repr(r.report.sharpness),
                             repr(r.coverage_90), repr(r.width_90)])
    with open(out / "intervals.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["trial", "method", "row", "lower", "upper"])
        for r in results:
            for i, (lo, hi) in enumerate(zip(r.lower, r.upper)):
                writer.writerow([r.trial, r.method, i, repr(float(lo)), repr(float(hi))])

    for row in summary:
        log.info("%-10s calibration_rmse=%.4f sharpness=%.4f", row["method"],
                 row["calibration_rmse_mean"], row["sharpness_mean"])


COMMANDS = {
    "fit": cmd_fit,
    "quantile": cmd_quantile,
    "interval": cmd_interval,
    "evaluate": cmd_evaluate,
    "curve": cmd_curve,
    "synth": cmd_synth,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="crudecal: %(message)s",
        stream=sys.stderr,
    )
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"crudecal: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CalibrationError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"crudecal: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"crudecal: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
