"""Method names, fitting dispatch and JSON persistence for fitted recalibrators."""

from __future__ import annotations

import json

from .baselines import GaussianMleModel, IdentityModel, KuleshovModel, fit_gaussian_mle, fit_kuleshov
from .conformal import ConformalCalibration, fit_conformal
from .core import PredictionSet
from .crude import CrudeModel, fit_crude

METHODS = ("none", "crude", "mle", "kuleshov", "conformal")

_FITTERS = {
    "none": lambda cal: IdentityModel(),
    "crude": fit_crude,
    "mle": fit_gaussian_mle,
    "kuleshov": fit_kuleshov,
    "conformal": fit_conformal,
}

# JSON "method" tag -> class
_LOADERS = {
    IdentityModel.method: lambda doc: IdentityModel(),
    CrudeModel.method: CrudeModel.from_dict,
    GaussianMleModel.method: GaussianMleModel.from_dict,
    KuleshovModel.method: KuleshovModel.from_dict,
    ConformalCalibration.method: ConformalCalibration.from_dict,
}


def parse_methods(spec: str) -> list[str]:
    """``"all"`` or a comma-separated subset of :data:`METHODS`, order preserved."""
    if spec.strip() == "all":
        return list(METHODS)
    names = [s.strip() for s in spec.split(",") if s.strip()]
    unknown = [n for n in names if n not in METHODS]
    if unknown or not names:
        raise ValueError(f"unknown method(s) {unknown}; choose from {', '.join(METHODS)} or all")
    return list(dict.fromkeys(names))


def fit(method: str, cal: PredictionSet):
    try:
        fitter = _FITTERS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}") from None
    return fitter(cal)


def model_to_json(model) -> str:
    # json emits repr(float), which round-trips exactly
    return json.dumps(model.to_dict(), indent=1)


def model_from_dict(doc: dict):
    # A bare {"z_sorted", "mean_z", "var_z"} document is a CRUDE model.
    method = doc.get("method", CrudeModel.method)
    if method not in _LOADERS:
        raise ValueError(f"unknown model method {method!r}")
    try:
        return _LOADERS[method](doc)
    except KeyError as exc:
        raise ValueError(f"{method} model document lacks field {exc}") from None


def save_model(path, model) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_json(model) + "\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
