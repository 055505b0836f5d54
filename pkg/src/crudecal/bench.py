"""Repeated-split benchmark of every recalibrator on one dataset."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EvaluationReport, PredictionSet, from_arrays
from .data import KnnPredictor, SplitSpec, SyntheticData, split, stream_seed
from .metrics import DEFAULT_STEPS, evaluate, interval_coverage
from .registry import fit

INTERVAL_LEVELS = (0.05, 0.95)


@dataclass(frozen=True)
class TrialResult:
    trial: int
    method: str
    report: EvaluationReport
    coverage_90: float
    width_90: float
    lower: np.ndarray
    upper: np.ndarray


def _predictions(data, train, cal, test, model: str, k: int):
    if model == "oracle":
        if isinstance(data, SyntheticData):
            return cal.predictions, test.predictions
        return cal, test
    if model == "knn":
        if not isinstance(data, SyntheticData):
            raise ValueError("the knn model needs features; pass a synthetic dump with an x column")
        knn = KnnPredictor(train.x, train.y, k=k)
        parts = []
        for part in (cal, test):
            mu, sigma = knn.predict(part.x)
            parts.append(from_arrays(mu, sigma, part.y))
        return tuple(parts)
    raise ValueError(f"unknown model {model!r}; expected oracle or knn")


def run_trial(
    data,
    methods,
    spec: SplitSpec,
    trial: int,
    *,
    steps: int = DEFAULT_STEPS,
    model: str = "oracle",
    k: int = 20,
) -> list[TrialResult]:
    train, cal, test = split(data, spec, trial)
    cal_set, test_set = _predictions(data, train, cal, test, model, k)
    seed = stream_seed(spec.seed, trial)
    p_l, p_u = INTERVAL_LEVELS
    results = []
    for method in methods:
        recal = fit(method, cal_set)
        report = evaluate(test_set, recal, method=method, steps=steps, seed=seed)
        coverage, width = interval_coverage(test_set, recal, p_l, p_u)
        lower = np.broadcast_to(recal.quantile(test_set.mu, test_set.sigma, p_l), test_set.mu.shape)
        upper = np.broadcast_to(recal.quantile(test_set.mu, test_set.sigma, p_u), test_set.mu.shape)
        results.append(TrialResult(trial, method, report, coverage, width, lower, upper))
    return results


def run_benchmark(
    data: SyntheticData | PredictionSet,
    methods,
    spec: SplitSpec,
    *,
    steps: int = DEFAULT_STEPS,
    model: str = "oracle",
    k: int = 20,
) -> list[TrialResult]:
    """All trials in order; each trial's shuffle depends only on ``(spec.seed, trial)``."""
    results = []
    for trial in range(spec.trials):
        results.extend(run_trial(data, methods, spec, trial, steps=steps, model=model, k=k))
    return results


def summarize(results: list[TrialResult]) -> list[dict]:
    methods = list(dict.fromkeys(r.method for r in results))
    rows = []
    for method in methods:
        rs = [r for r in results if r.method == method]
        cal = np.array([r.report.calibration_rmse for r in rs])
        sharp = np.array([r.report.sharpness for r in rs])
        rows.append(
            {
                "method": method,
                "trials": len(rs),
                "calibration_rmse_mean": float(cal.mean()),
                "calibration_rmse_std": float(cal.std()),
                "sharpness_mean": float(sharp.mean()),
                "sharpness_std": float(sharp.std()),
                "coverage_90_mean": float(np.mean([r.coverage_90 for r in rs])),
                "width_90_mean": float(np.mean([r.width_90 for r in rs])),
            }
        )
    return rows
