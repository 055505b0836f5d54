"""Shared domain types and validation of raw (mu, sigma, y) prediction triples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

import numpy as np


class CalibrationError(ValueError):
    """Base class for every data or contract error raised by crudecal."""


class NonFiniteValue(CalibrationError):
    pass


class NonPositiveSigma(CalibrationError):
    def __init__(self, row: int, value: float):
        super().__init__(f"sigma must be > 0 (row {row}: {value!r})")
        self.row = row
        self.value = value


class EmptyInput(CalibrationError):
    pass


class EmptyCalibrationSet(EmptyInput):
    pass


class EmptyTestSet(EmptyInput):
    pass


class UnlabeledCalibrationSet(CalibrationError):
    pass


class UnlabeledTestSet(CalibrationError):
    pass


class TooFewPoints(CalibrationError):
    pass


class ProbabilityOutOfRange(CalibrationError):
    pass


class ProbabilityOutOfOpenRange(ProbabilityOutOfRange):
    pass


class InvertedLevels(CalibrationError):
    pass


class LengthMismatch(CalibrationError):
    pass


class PredictionRecord(NamedTuple):
    mu: float
    sigma: float
    y: Optional[float] = None


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PredictionSet:
    """Column-oriented, read-only set of predictions.

    ``y`` holds NaN where a row has no observed target; ``labeled`` is True
    only when every row carries one.
    """

    mu: np.ndarray
    sigma: np.ndarray
    y: np.ndarray
    labeled: bool

    def __len__(self) -> int:
        return len(self.mu)

    def __iter__(self) -> Iterator[PredictionRecord]:
        return iter(self.records)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PredictionSet):
            return NotImplemented
        return (
            self.labeled == other.labeled
            and np.array_equal(self.mu, other.mu)
            and np.array_equal(self.sigma, other.sigma)
            and np.array_equal(self.y, other.y, equal_nan=True)
        )

    @property
    def records(self) -> list[PredictionRecord]:
        return [
            PredictionRecord(float(m), float(s), None if math.isnan(t) else float(t))
            for m, s, t in zip(self.mu, self.sigma, self.y)
        ]

    def subset(self, index: Sequence[int] | np.ndarray) -> "PredictionSet":
        index = np.asarray(index, dtype=np.intp)
        y = self.y[index]
        return PredictionSet(
            _frozen(self.mu[index]),
            _frozen(self.sigma[index]),
            _frozen(y),
            bool(len(y)) and not np.isnan(y).any(),
        )

    def z_scores(self) -> np.ndarray:
        """Signed standardized residuals ``(y - mu) / sigma``."""
        return (self.y - self.mu) / self.sigma


def from_arrays(mu, sigma, y=None) -> PredictionSet:
    """Validate column arrays; ``y`` may be None or contain NaN for missing targets."""
    mu = np.asarray(mu, dtype=float).ravel()
    sigma = np.asarray(sigma, dtype=float).ravel()
    if y is None:
        y = np.full(mu.shape, np.nan)
        missing = np.ones(mu.shape, dtype=bool)
    else:
        y = np.asarray(y, dtype=float).ravel()
        missing = np.isnan(y)
    if not (len(mu) == len(sigma) == len(y)):
        raise LengthMismatch(
            f"column lengths differ: mu={len(mu)}, sigma={len(sigma)}, y={len(y)}"
        )
    if len(mu) == 0:
        raise EmptyInput("no prediction rows")

    for name, col in (("mu", mu), ("sigma", sigma)):
        bad = ~np.isfinite(col)
        if bad.any():
            row = int(np.argmax(bad))
            raise NonFiniteValue(f"{name} is not finite at row {row}: {col[row]!r}")
    bad = ~np.isfinite(y) & ~missing
    if bad.any():
        row = int(np.argmax(bad))
        raise NonFiniteValue(f"y is not finite at row {row}: {y[row]!r}")
    bad = sigma <= 0
    if bad.any():
        row = int(np.argmax(bad))
        raise NonPositiveSigma(row, float(sigma[row]))

    return PredictionSet(_frozen(mu), _frozen(sigma), _frozen(y), not missing.any())


def validate_predictions(rows: Iterable[Sequence[Optional[float]]]) -> PredictionSet:
    """Build a :class:`PredictionSet` from ``(mu, sigma)`` or ``(mu, sigma, y)`` rows.

    A missing target may be given as a 2-tuple or with ``y=None``. Mixed
    labelling is allowed and simply yields ``labeled=False``.

    Raises
    ------
    NonFiniteValue
        Any NaN or infinite value.
    NonPositiveSigma
        ``sigma <= 0``; the offending row index is attached.
    """
    mu, sigma, y = [], [], []
    for row in rows:
        if len(row) not in (2, 3):
            raise LengthMismatch(f"row {len(mu)} has {len(row)} fields, expected 2 or 3")
        target = row[2] if len(row) == 3 else None
        if target is not None and math.isnan(float(target)):
            raise NonFiniteValue(f"y is not finite at row {len(mu)}: {target!r}")
        mu.append(row[0])
        sigma.append(row[1])
        y.append(math.nan if target is None else target)
    if not mu:
        raise EmptyInput("no prediction rows")
    return from_arrays(mu, sigma, y)


def require_labeled(data: PredictionSet, *, calibration: bool = True) -> None:
    if len(data) == 0:
        raise (EmptyCalibrationSet if calibration else EmptyTestSet)("empty prediction set")
    if not data.labeled:
        kind = UnlabeledCalibrationSet if calibration else UnlabeledTestSet
        raise kind("every row needs an observed target y")


def check_probability(p, *, open_interval: bool = False) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if open_interval:
        if not np.all((p > 0) & (p < 1)):
            raise ProbabilityOutOfOpenRange("p must lie strictly between 0 and 1")
    elif not np.all((p >= 0) & (p <= 1)):
        raise ProbabilityOutOfRange("p must lie in [0, 1]")
    return p


def scalar_or_array(a: np.ndarray):
    """Return a Python float for 0-d results, the array otherwise."""
    return float(a) if np.ndim(a) == 0 else a


def order_statistic_index(p, size: int) -> np.ndarray:
    """Index ``floor(p * size)`` clamped to ``[0, size - 1]``.

    Shared by the CRUDE quantile and the conformal level so the two can never
    disagree on which order statistic a level selects.
    """
    idx = np.floor(np.asarray(p, dtype=float) * size).astype(np.intp)
    return np.clip(idx, 0, size - 1)


def shift_scale(mu, sigma, z):
    """``mu + sigma * z``; the one place predicted parameters are applied."""
    return np.asarray(mu, dtype=float) + np.asarray(sigma, dtype=float) * z


@dataclass(frozen=True, eq=False)
class EmpiricalErrorDistribution:
    """Sorted calibration z-scores and their population moments."""

    z_sorted: np.ndarray
    mean_z: float
    var_z: float

    @classmethod
    def from_scores(cls, z) -> "EmpiricalErrorDistribution":
        z = np.asarray(z, dtype=float).ravel()
        if len(z) == 0:
            raise EmptyCalibrationSet("no calibration scores")
        if not np.isfinite(z).all():
            raise NonFiniteValue("calibration scores must be finite")
        z = _frozen(np.sort(z, kind="stable"))
        mean = float(np.mean(z))
        return cls(z, mean, float(np.mean((z - mean) ** 2)))

    @property
    def size(self) -> int:
        return len(self.z_sorted)

    def quantile(self, p) -> np.ndarray:
        return self.z_sorted[order_statistic_index(p, self.size)]

    def cdf(self, z) -> np.ndarray:
        # |{z_c <= z}| / L
        return np.searchsorted(self.z_sorted, z, side="right") / self.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmpiricalErrorDistribution):
            return NotImplemented
        return (
            np.array_equal(self.z_sorted, other.z_sorted)
            and self.mean_z == other.mean_z
            and self.var_z == other.var_z
        )


@dataclass(frozen=True)
class CalibrationCurve:
    expected: np.ndarray
    observed: np.ndarray

    @property
    def steps(self) -> int:
        return len(self.expected) - 1


@dataclass(frozen=True)
class EvaluationReport:
    method: str
    calibration_rmse: float
    sharpness: float
    trial_seed: int

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "calibration_rmse": self.calibration_rmse,
            "sharpness": self.sharpness,
            "seed": self.trial_seed,
        }
