"""Empirical z-score recalibration.

Calibration z-scores ``(y - mu) / sigma`` are sorted once at fit time; every
later query is a single index lookup (quantile), a binary search (CDF) or a
closed-form expression in the cached moments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    EmpiricalErrorDistribution,
    PredictionSet,
    check_probability,
    require_labeled,
    scalar_or_array,
    shift_scale,
)


@dataclass(frozen=True)
class CrudeModel:
    dist: EmpiricalErrorDistribution

    method = "crude"

    @property
    def size(self) -> int:
        return self.dist.size

    def quantile(self, mu, sigma, p):
        """Calibrated ``p``-quantile ``mu + sigma * z_sorted[floor(p * L)]``.

        Broadcasts over ``mu``, ``sigma`` and ``p``. ``p = 1`` selects the
        largest z-score.
        """
        p = check_probability(p)
        return scalar_or_array(shift_scale(mu, sigma, self.dist.quantile(p)))

    def cdf(self, mu, sigma, y):
        z = (np.asarray(y, dtype=float) - mu) / np.asarray(sigma, dtype=float)
        return scalar_or_array(self.dist.cdf(z))

    def mean(self, mu, sigma):
        return scalar_or_array(shift_scale(mu, sigma, self.dist.mean_z))

    def variance(self, mu, sigma):
        sigma = np.asarray(sigma, dtype=float)
        return scalar_or_array(sigma**2 * self.dist.var_z)

    def moments(self, mu, sigma):
        return self.mean(mu, sigma), self.variance(mu, sigma)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "z_sorted": self.dist.z_sorted.tolist(),
            "mean_z": self.dist.mean_z,
            "var_z": self.dist.var_z,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CrudeModel":
        # Stored moments are restored verbatim rather than recomputed.
        z = np.array(doc["z_sorted"], dtype=float)
        if np.any(np.diff(z) < 0):
            raise ValueError("z_sorted is not sorted")
        z.setflags(write=False)
        return cls(EmpiricalErrorDistribution(z, float(doc["mean_z"]), float(doc["var_z"])))


def fit_crude(cal: PredictionSet) -> CrudeModel:
    """Fit the empirical error distribution on a labelled calibration set.

    Raises
    ------
    UnlabeledCalibrationSet, EmptyCalibrationSet
    """
    require_labeled(cal)
    return CrudeModel(EmpiricalErrorDistribution.from_scores(cal.z_scores()))


def crude_quantile(model: CrudeModel, pred, p):
    mu, sigma = pred
    return model.quantile(mu, sigma, p)


def crude_cdf(model: CrudeModel, pred, y):
    mu, sigma = pred
    return model.cdf(mu, sigma, y)


def crude_moments(model: CrudeModel, pred):
    """``(mean, variance)`` of the calibrated predictive law for ``pred = (mu, sigma)``."""
    mu, sigma = pred
    return model.moments(mu, sigma)
