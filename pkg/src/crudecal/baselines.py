"""Comparison recalibrators sharing the CRUDE query interface.

* :class:`IdentityModel` reads ``(mu, sigma)`` as a Gaussian, uncalibrated.
* :class:`GaussianMleModel` fits a shifted and rescaled Gaussian to the
  calibration z-scores.
* :class:`KuleshovModel` learns a monotone map from nominal Gaussian
  probability to observed frequency with isotonic regression and inverts it.

The query methods accept the closed interval ``p in [0, 1]`` and return
``-inf``/``+inf`` at the endpoints, which is what the calibration curve needs.
The ``*_quantile`` functions enforce the open interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri
from scipy.stats import rankdata

from .core import (
    LengthMismatch,
    PredictionSet,
    TooFewPoints,
    check_probability,
    require_labeled,
    scalar_or_array,
    shift_scale,
)

S_MIN = 1e-12
P_CLAMP = 1e-6
# Midpoint rule over 1000 equal-probability slices of (0, 1).
QUADRATURE_LEVELS = (np.arange(1000) + 0.5) / 1000


def _require_fit_input(cal: PredictionSet) -> np.ndarray:
    require_labeled(cal)
    if len(cal) < 2:
        raise TooFewPoints(f"need at least 2 calibration points, got {len(cal)}")
    return cal.z_scores()


@dataclass(frozen=True)
class IdentityModel:
    method = "none"

    def quantile(self, mu, sigma, p):
        p = check_probability(p)
        return scalar_or_array(shift_scale(mu, sigma, ndtri(p)))

    def cdf(self, mu, sigma, y):
        return scalar_or_array(ndtr((np.asarray(y, dtype=float) - mu) / sigma))

    def variance(self, mu, sigma):
        return scalar_or_array(np.asarray(sigma, dtype=float) ** 2)

    def to_dict(self) -> dict:
        return {"method": self.method}


@dataclass(frozen=True)
class GaussianMleModel:
    m: float
    s: float

    method = "gaussian_mle"

    def quantile(self, mu, sigma, p):
        p = check_probability(p)
        return scalar_or_array(shift_scale(mu, sigma, self.m + self.s * ndtri(p)))

    def cdf(self, mu, sigma, y):
        z = (np.asarray(y, dtype=float) - mu) / sigma
        return scalar_or_array(ndtr((z - self.m) / self.s))

    def mean(self, mu, sigma):
        return scalar_or_array(shift_scale(mu, sigma, self.m))

    def variance(self, mu, sigma):
        return scalar_or_array((np.asarray(sigma, dtype=float) * self.s) ** 2)

    def to_dict(self) -> dict:
        return {"method": self.method, "m": self.m, "s": self.s}

    @classmethod
    def from_dict(cls, doc: dict) -> "GaussianMleModel":
        return cls(float(doc["m"]), float(doc["s"]))


def fit_gaussian_mle(cal: PredictionSet) -> GaussianMleModel:
    """Maximum-likelihood Normal(m, s^2) over the calibration z-scores.

    ``s`` is the population standard deviation, floored at ``S_MIN``.
    """
    z = _require_fit_input(cal)
    m = float(np.mean(z))
    s = float(np.sqrt(np.mean((z - m) ** 2)))
    return GaussianMleModel(m, max(s, S_MIN))


def gaussian_mle_quantile(model: GaussianMleModel, pred, p):
    check_probability(p, open_interval=True)
    return model.quantile(*pred, p)


def identity_quantile(pred, p):
    check_probability(p, open_interval=True)
    return IdentityModel().quantile(*pred, p)


def pava(x, y, weights=None) -> np.ndarray:
    """Weighted least-squares non-decreasing fit of ``y`` (pool adjacent violators).

    ``x`` only fixes the order and must already be sorted; it is checked for
    length but otherwise unused.
    """
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    if not (len(x) == len(y) == len(w)):
        raise LengthMismatch(f"lengths differ: x={len(x)}, y={len(y)}, weights={len(w)}")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")

    # Stack of blocks: weighted mean, total weight, member count.
    means: list[float] = []
    totals: list[float] = []
    counts: list[int] = []
    for yi, wi in zip(y, w):
        means.append(float(yi))
        totals.append(float(wi))
        counts.append(1)
        while len(means) > 1 and means[-2] > means[-1]:
            m2, w2, c2 = means.pop(), totals.pop(), counts.pop()
            w1 = totals[-1]
            means[-1] = (means[-1] * w1 + m2 * w2) / (w1 + w2)
            totals[-1] = w1 + w2
            counts[-1] += c2
    return np.repeat(means, counts)


def _isotonic_knots(q: np.ndarray, e: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Isotonic fit of ``e`` on ``q`` with tied ``q`` merged into one weighted knot."""
    order = np.argsort(q, kind="stable")
    q, e = q[order], e[order]
    knots, start, count = np.unique(q, return_index=True, return_counts=True)
    sums = np.add.reduceat(e, start)
    return knots, pava(knots, sums / count, count.astype(float))


def _augment(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # A knot already sitting on an endpoint is overwritten by it.
    inner = (x > 0) & (x < 1)
    return np.r_[0.0, x[inner], 1.0], np.r_[0.0, y[inner], 1.0]


@dataclass(frozen=True, eq=False)
class KuleshovModel:
    """Piecewise-linear recalibration map ``R`` through ``(iso_x, iso_y)``."""

    iso_x: np.ndarray
    iso_y: np.ndarray

    method = "kuleshov"

    def __post_init__(self):
        x = np.array(self.iso_x, dtype=float)
        y = np.array(self.iso_y, dtype=float)
        if len(x) != len(y):
            raise LengthMismatch("iso_x and iso_y differ in length")
        if np.any(np.diff(x) <= 0) or np.any(np.diff(y) < 0):
            raise ValueError("recalibration map must be increasing in x, non-decreasing in y")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "iso_x", x)
        object.__setattr__(self, "iso_y", y)
        object.__setattr__(self, "_quad_z", ndtri(self.base_level(QUADRATURE_LEVELS)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KuleshovModel):
            return NotImplemented
        return np.array_equal(self.iso_x, other.iso_x) and np.array_equal(self.iso_y, other.iso_y)

    def recalibrate(self, level):
        """``R(level)``: observed frequency at a nominal Gaussian level."""
        return np.interp(level, self.iso_x, self.iso_y)

    def base_level(self, p) -> np.ndarray:
        """Smallest nominal level ``p'`` with ``R(p') >= p``, clamped away from 0 and 1."""
        p = np.asarray(p, dtype=float)
        x, y = self.iso_x, self.iso_y
        j = np.clip(np.searchsorted(y, p, side="left"), 1, len(y) - 1)
        x0, x1, y0, y1 = x[j - 1], x[j], y[j - 1], y[j]
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(y1 > y0, (p - y0) / (y1 - y0), 1.0)
        level = np.where(p == y1, x1, x0 + np.clip(frac, 0.0, 1.0) * (x1 - x0))
        return np.clip(level, P_CLAMP, 1 - P_CLAMP)

    def quantile(self, mu, sigma, p):
        p = check_probability(p)
        z = ndtri(self.base_level(p))
        z = np.where(p == 0, -np.inf, np.where(p == 1, np.inf, z))
        return scalar_or_array(shift_scale(mu, sigma, z))

    def cdf(self, mu, sigma, y):
        z = (np.asarray(y, dtype=float) - mu) / sigma
        return scalar_or_array(self.recalibrate(ndtr(z)))

    def variance(self, mu, sigma):
        # Quantile function is mu + sigma * g(p); only Var[g] needs quadrature.
        return scalar_or_array(np.asarray(sigma, dtype=float) ** 2 * float(np.var(self._quad_z)))

    def to_dict(self) -> dict:
        return {"method": self.method, "iso_x": self.iso_x.tolist(), "iso_y": self.iso_y.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "KuleshovModel":
        return cls(np.array(doc["iso_x"], dtype=float), np.array(doc["iso_y"], dtype=float))


def fit_kuleshov(cal: PredictionSet) -> KuleshovModel:
    """Isotonic recalibration of the model's own Gaussian CDF values.

    Each calibration point contributes ``q = Phi(z)`` paired with its
    average-rank empirical frequency; the isotonic fit of frequency on ``q``
    is pinned to ``(0, 0)`` and ``(1, 1)``.
    """
    q = ndtr(_require_fit_input(cal))
    e = rankdata(q, method="average") / len(q)
    return KuleshovModel(*_augment(*_isotonic_knots(q, e)))


def kuleshov_quantile(model: KuleshovModel, pred, p):
    check_probability(p, open_interval=True)
    return model.quantile(*pred, p)
