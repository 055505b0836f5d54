"""Data plumbing: CSV files, reproducible splits, synthetic data and a k-NN predictor."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import CalibrationError, NonFiniteValue, PredictionSet, from_arrays

FAMILIES = ("gaussian", "lognormal_shifted", "student_t")
DEFAULT_FAMILY_PARAMS = {"gaussian": (), "lognormal_shifted": (0.8,), "student_t": (5.0,)}
SIGMA_FLOOR = 1e-6

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class ParseError(CalibrationError):
    def __init__(self, row: int, column: str, message: str = "cannot parse value"):
        super().__init__(f"row {row}, column {column}: {message}")
        self.row = row
        self.column = column


class EmptyPartition(CalibrationError):
    pass


class InvalidFamilyParams(CalibrationError):
    pass


class KTooLarge(CalibrationError):
    pass


# -- PRNG ---------------------------------------------------------------------


def _mix64(z):
    """SplitMix64 output finaliser on uint64 arrays (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def splitmix64(state: int, n: int) -> np.ndarray:
    """First ``n`` outputs of SplitMix64 started from ``state``."""
    steps = np.arange(1, n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix64(np.uint64(state & _MASK64) + steps * np.uint64(_GAMMA))


def stream_seed(seed: int, trial: int) -> int:
    """Per-trial SplitMix64 state: ``mix(mix(seed + gamma) ^ trial + gamma)``."""
    first = int(splitmix64(seed, 1)[0])
    return int(splitmix64(first ^ (trial & _MASK64), 1)[0])


def permutation(n: int, seed: int, trial: int = 0) -> np.ndarray:
    """Reproducible permutation of ``range(n)``: indices ordered by SplitMix64 keys."""
    return np.argsort(splitmix64(stream_seed(seed, trial), n), kind="stable")


# -- splits -------------------------------------------------------------------


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float = 0.5
    cal_frac: float = 0.4
    test_frac: float = 0.1
    seed: int = 0
    trials: int = 20

    def __post_init__(self):
        fracs = (self.train_frac, self.cal_frac, self.test_frac)
        if min(fracs) <= 0 or abs(sum(fracs) - 1) > 1e-9:
            raise ValueError(f"split fractions must be positive and sum to 1, got {fracs}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def sizes(self, n: int) -> tuple[int, int, int]:
        n_train = math.floor(n * self.train_frac)
        n_cal = math.floor(n * self.cal_frac)
        return n_train, n_cal, n - n_train - n_cal


def split_indices(n: int, spec: SplitSpec, trial: int):
    if not 0 <= trial < spec.trials:
        raise ValueError(f"trial {trial} outside [0, {spec.trials})")
    sizes = spec.sizes(n)
    if min(sizes) < 1:
        raise EmptyPartition(f"split of {n} rows gives partition sizes {sizes}")
    order = permutation(n, spec.seed, trial)
    a, b = sizes[0], sizes[0] + sizes[1]
    return order[:a], order[a:b], order[b:]


def split(records, spec: SplitSpec, trial: int):
    """Shuffle by ``(spec.seed, trial)`` and cut into (train, cal, test).

    Partition sizes are ``floor(n * train_frac)``, ``floor(n * cal_frac)`` and
    the remainder. ``records`` may be a :class:`PredictionSet`,
    :class:`SyntheticData`, numpy array or plain sequence.
    """
    parts = split_indices(len(records), spec, trial)
    if hasattr(records, "subset"):
        return tuple(records.subset(idx) for idx in parts)
    if isinstance(records, np.ndarray):
        return tuple(records[idx] for idx in parts)
    return tuple([records[i] for i in idx] for idx in parts)


# -- synthetic data -----------------------------------------------------------


@dataclass(frozen=True)
class SyntheticConfig:
    n: int
    family: str = "gaussian"
    family_params: tuple = ()
    hetero: bool = True
    miscal_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidFamilyParams(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        params = tuple(float(v) for v in self.family_params) or DEFAULT_FAMILY_PARAMS[self.family]
        object.__setattr__(self, "family_params", params)
        expected = len(DEFAULT_FAMILY_PARAMS[self.family])
        if len(params) != expected:
            raise InvalidFamilyParams(f"{self.family} takes {expected} parameter(s), got {params}")
        if self.family == "lognormal_shifted" and not params[0] > 0:
            raise InvalidFamilyParams("lognormal log-scale s must be > 0")
        if self.family == "student_t" and not params[0] > 2:
            raise InvalidFamilyParams("student_t needs nu > 2 for a finite variance")
        if not self.miscal_scale > 0:
            raise InvalidFamilyParams("miscal_scale must be > 0")
        if self.n < 1:
            raise InvalidFamilyParams("n must be >= 1")


def standardized_noise(family: str, params: Sequence[float], n: int, rng: np.random.Generator):
    """Zero-mean, unit-variance draws that keep the family's skew or tails."""
    if family == "gaussian":
        return rng.standard_normal(n)
    if family == "lognormal_shifted":
        (s,) = params
        w = np.exp(s * rng.standard_normal(n))
        mean = math.exp(s * s / 2)
        std = math.sqrt(math.expm1(s * s) * math.exp(s * s))
        return (w - mean) / std
    if family == "student_t":
        (nu,) = params
        return rng.standard_t(nu, n) * math.sqrt((nu - 2) / nu)
    raise InvalidFamilyParams(f"unknown family {family!r}")


def true_mu(x):
    return 2.0 * np.sin(np.pi * x) + x


def true_sigma(x, hetero: bool = True):
    if not hetero:
        return np.ones_like(np.asarray(x, dtype=float))
    return 0.4 + 0.3 * (1.0 + np.cos(np.pi * x))


@dataclass(frozen=True, eq=False)
class SyntheticData:
    x: np.ndarray
    mu: np.ndarray
    sigma_reported: np.ndarray
    sigma_true: np.ndarray
    y: np.ndarray

    def __len__(self) -> int:
        return len(self.x)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SyntheticData):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("x", "mu", "sigma_reported", "sigma_true", "y")
        )

    @property
    def predictions(self) -> PredictionSet:
        return from_arrays(self.mu, self.sigma_reported, self.y)

    def subset(self, index) -> "SyntheticData":
        return SyntheticData(
            self.x[index], self.mu[index], self.sigma_reported[index], self.sigma_true[index], self.y[index]
        )


def synth_generate(config: SyntheticConfig) -> SyntheticData:
    """Draw ``y = mu(x) + z * sigma(x)`` with ``x ~ U(-1, 1)`` and ``z`` from ``config.family``.

    The reported scale is ``sigma_true * miscal_scale``; a value below 1
    makes the "model" overconfident.
    """
    rng = np.random.default_rng(config.seed)
    x = rng.uniform(-1.0, 1.0, config.n)
    z = standardized_noise(config.family, config.family_params, config.n, rng)
    mu = true_mu(x)
    sigma = true_sigma(x, config.hetero)
    return SyntheticData(x, mu, sigma * config.miscal_scale, sigma, mu + z * sigma)


# -- k-NN predictor -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KnnPredictor:
    """Mean and spread of the ``k`` nearest training targets (Euclidean)."""

    train_x: np.ndarray
    train_y: np.ndarray
    k: int = 20
    chunk: int = field(default=512, repr=False)

    def __post_init__(self):
        x = np.asarray(self.train_x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        y = np.asarray(self.train_y, dtype=float).ravel()
        if len(x) != len(y):
            raise ValueError("train_x and train_y differ in length")
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.k > len(y):
            raise KTooLarge(f"k={self.k} exceeds training size {len(y)}")
        object.__setattr__(self, "train_x", x)
        object.__setattr__(self, "train_y", y)

    def predict(self, x) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None] if self.train_x.shape[1] == 1 else x[None, :]
        mus, sigmas = [], []
        for start in range(0, len(x), self.chunk):
            q = x[start : start + self.chunk]
            d2 = ((q[:, None, :] - self.train_x[None, :, :]) ** 2).sum(axis=-1)
            # stable sort keeps the lower training index first among equal distances
            nearest = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
            ys = self.train_y[nearest]
            mus.append(ys.mean(axis=1))
            sigmas.append(np.maximum(ys.std(axis=1), SIGMA_FLOOR))
        return np.concatenate(mus), np.concatenate(sigmas)


def knn_predict(model: KnnPredictor, x) -> tuple[float, float]:
    mu, sigma = model.predict(np.atleast_2d(np.asarray(x, dtype=float)))
    return float(mu[0]), float(sigma[0])


# -- CSV ----------------------------------------------------------------------


def _read_rows(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(0, "header", "empty file")
    return [h.strip() for h in rows[0]], rows[1:]


def _parse_column(rows, col: int, name: str, *, optional: bool = False) -> np.ndarray:
    out = np.empty(len(rows))
    for i, row in enumerate(rows, start=1):
        cell = row[col].strip() if col < len(row) else ""
        if cell == "" and optional:
            out[i - 1] = math.nan
            continue
        try:
            value = float(cell)
        except ValueError:
            raise ParseError(i, name) from None
        if math.isnan(value):
            raise NonFiniteValue(f"row {i}, column {name}: NaN")
        out[i - 1] = value
    return out


def read_table(path, columns: Sequence[str], optional: Sequence[str] = ()) -> dict[str, np.ndarray]:
    """Parse named float columns from a headed CSV; other columns are ignored."""
    header, rows = _read_rows(path)
    rows = [r for r in rows if any(c.strip() for c in r)]
    table = {}
    for name in list(columns) + list(optional):
        if name not in header:
            if name in optional:
                continue
            raise ParseError(0, name, "missing column")
        table[name] = _parse_column(rows, header.index(name), name, optional=name in optional)
    return table


def load_csv(path) -> PredictionSet:
    """Read a ``mu,sigma[,y]`` prediction file; blank ``y`` cells mean unlabelled.

    A synthetic dump (``sigma_reported`` instead of ``sigma``) is accepted too.
    """
    header, _ = _read_rows(path)
    sigma_col = "sigma" if "sigma" in header or "sigma_reported" not in header else "sigma_reported"
    table = read_table(path, ["mu", sigma_col], optional=["y"])
    return from_arrays(table["mu"], table[sigma_col], table.get("y"))


def _fmt(v: float) -> str:
    return "" if math.isnan(v) else repr(float(v))


def write_table(path, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    arrays = [np.asarray(columns[k], dtype=float) for k in names]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*arrays):
            writer.writerow([_fmt(v) for v in row])


def write_csv(path, data: PredictionSet, extra: dict[str, np.ndarray] | None = None) -> None:
    """Write ``mu,sigma[,y]`` plus any extra columns, floats at full precision."""
    columns = {"mu": data.mu, "sigma": data.sigma}
    if not np.isnan(data.y).all():
        columns["y"] = data.y
    columns.update(extra or {})
    write_table(path, columns)


SYNTH_COLUMNS = ("x", "mu", "sigma_reported", "sigma_true", "y")


def write_synthetic(path, data: SyntheticData) -> None:
    write_table(path, {k: getattr(data, k) for k in SYNTH_COLUMNS})


def load_synthetic(path) -> SyntheticData:
    table = read_table(path, SYNTH_COLUMNS)
    return SyntheticData(*(table[k] for k in SYNTH_COLUMNS))


def is_synthetic_dump(path) -> bool:
    header, _ = _read_rows(Path(path))
    return all(k in header for k in SYNTH_COLUMNS)
