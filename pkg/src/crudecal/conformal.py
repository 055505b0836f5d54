"""Split conformal intervals with the signed, scale-normalised score ``(y - mu) / sigma``.

The level selection reuses :func:`crudecal.core.order_statistic_index` and the
endpoint arithmetic reuses :func:`crudecal.core.shift_scale`, so intervals
agree bit-for-bit with pairs of CRUDE quantiles fitted on the same data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    EmpiricalErrorDistribution,
    InvertedLevels,
    PredictionSet,
    check_probability,
    order_statistic_index,
    require_labeled,
    scalar_or_array,
    shift_scale,
)


@dataclass(frozen=True, eq=False)
class ConformalCalibration:
    scores: np.ndarray

    method = "conformal"

    @property
    def size(self) -> int:
        return len(self.scores)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConformalCalibration):
            return NotImplemented
        return np.array_equal(self.scores, other.scores)

    def level(self, p):
        p = check_probability(p)
        return scalar_or_array(self.scores[order_statistic_index(p, self.size)])

    def interval(self, mu, sigma, p_l, p_u):
        if np.any(np.asarray(p_l) >= np.asarray(p_u)):
            raise InvertedLevels("p_l must be strictly below p_u")
        lower = shift_scale(mu, sigma, self.level(p_l))
        upper = shift_scale(mu, sigma, self.level(p_u))
        return scalar_or_array(lower), scalar_or_array(upper)

    # The conformal bounds at every level define a predictive law; exposing it
    # lets the same metrics score conformal and CRUDE side by side.
    def quantile(self, mu, sigma, p):
        return scalar_or_array(shift_scale(mu, sigma, self.level(p)))

    def cdf(self, mu, sigma, y):
        z = (np.asarray(y, dtype=float) - mu) / np.asarray(sigma, dtype=float)
        return scalar_or_array(np.searchsorted(self.scores, z, side="right") / self.size)

    def variance(self, mu, sigma):
        return scalar_or_array(np.asarray(sigma, dtype=float) ** 2 * float(np.var(self.scores)))

    def to_dict(self) -> dict:
        return {"method": self.method, "scores": self.scores.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "ConformalCalibration":
        scores = np.array(doc["scores"], dtype=float)
        if np.any(np.diff(scores) < 0):
            raise ValueError("scores are not sorted")
        scores.setflags(write=False)
        return cls(scores)


def fit_conformal(cal: PredictionSet) -> ConformalCalibration:
    require_labeled(cal)
    return ConformalCalibration(EmpiricalErrorDistribution.from_scores(cal.z_scores()).z_sorted)


def conformal_level(calib: ConformalCalibration, p):
    return calib.level(p)


def conformal_interval(calib: ConformalCalibration, pred, p_l, p_u):
    """``(mu + sigma * z_l, mu + sigma * z_u)`` for levels ``p_l < p_u``."""
    mu, sigma = pred
    return calib.interval(mu, sigma, p_l, p_u)
