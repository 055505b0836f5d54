"""Calibration curve, RMSE calibration score, sharpness and PIT values.

Every function takes a fitted recalibrator (anything with ``quantile``,
``cdf`` and ``variance`` methods over ``(mu, sigma, ...)``) or the bare
callable it needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.stats import kstest

from .core import (
    CalibrationCurve,
    EmptyTestSet,
    EvaluationReport,
    PredictionSet,
    require_labeled,
)

DEFAULT_STEPS = 100

QuantileFn = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


def _bound(obj, name: str):
    return getattr(obj, name) if hasattr(obj, name) else obj


@dataclass(frozen=True)
class PitSample:
    values: np.ndarray

    def ks_test(self):
        """Kolmogorov-Smirnov test of the PIT values against Uniform(0, 1)."""
        return kstest(self.values, "uniform")


def calibration_curve(
    test: PredictionSet, quantile_fn: Union[QuantileFn, object], steps: int = DEFAULT_STEPS
) -> CalibrationCurve:
    """Empirical frequency of ``y < F^-1(p_j)`` at ``p_j = j / steps``, ``j = 0..steps``.

    The comparison is strict, so a target sitting exactly on a predicted
    quantile counts as not covered.
    """
    require_labeled(test, calibration=False)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    quantile = _bound(quantile_fn, "quantile")
    expected = np.arange(steps + 1) / steps
    observed = np.array(
        [np.mean(test.y < quantile(test.mu, test.sigma, p)) for p in expected]
    )
    return CalibrationCurve(expected, observed)


def calibration_score(curve: CalibrationCurve) -> float:
    """``sqrt(sum_j (p_hat_j - p_j)^2 / S)`` over all ``S + 1`` knots.

    The divisor is ``S`` rather than ``S + 1`` so scores stay comparable with
    published numbers computed the same way.
    """
    err = np.asarray(curve.observed) - np.asarray(curve.expected)
    return float(np.sqrt(np.sum(err**2) / curve.steps))


def sharpness(test: PredictionSet, variance_fn) -> float:
    """Root mean calibrated predictive variance, in target units."""
    if len(test) == 0:
        raise EmptyTestSet("sharpness needs at least one prediction")
    variance = _bound(variance_fn, "variance")
    var = np.broadcast_to(variance(test.mu, test.sigma), test.mu.shape)
    return float(np.sqrt(np.mean(var)))


def pit_values(test: PredictionSet, cdf_fn) -> PitSample:
    require_labeled(test, calibration=False)
    cdf = _bound(cdf_fn, "cdf")
    return PitSample(np.asarray(cdf(test.mu, test.sigma, test.y), dtype=float))


def interval_coverage(test: PredictionSet, recalibrator, p_l: float = 0.05, p_u: float = 0.95):
    """Fraction of targets inside ``[q(p_l), q(p_u)]`` and the mean interval width."""
    require_labeled(test, calibration=False)
    lower = recalibrator.quantile(test.mu, test.sigma, p_l)
    upper = recalibrator.quantile(test.mu, test.sigma, p_u)
    inside = (test.y >= lower) & (test.y <= upper)
    return float(np.mean(inside)), float(np.mean(upper - lower))


def evaluate(
    test: PredictionSet,
    recalibrator,
    *,
    method: str | None = None,
    steps: int = DEFAULT_STEPS,
    seed: int = 0,
) -> EvaluationReport:
    curve = calibration_curve(test, recalibrator, steps)
    return EvaluationReport(
        method=method or recalibrator.method,
        calibration_rmse=calibration_score(curve),
        sharpness=sharpness(test, recalibrator),
        trial_seed=seed,
    )
