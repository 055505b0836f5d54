"""Post-hoc recalibration of probabilistic regression outputs.

A black-box model supplies a shift ``mu`` and scale ``sigma`` per example.
CRUDE turns these into a full predictive distribution using the empirical
distribution of calibration z-scores ``(y - mu) / sigma``; Gaussian MLE and
isotonic (Kuleshov-style) recalibration are provided for comparison, along
with split conformal intervals and calibration/sharpness metrics.
"""

from .baselines import (
    GaussianMleModel,
    IdentityModel,
    KuleshovModel,
    fit_gaussian_mle,
    fit_kuleshov,
    gaussian_mle_quantile,
    identity_quantile,
    kuleshov_quantile,
    pava,
)
from .conformal import ConformalCalibration, conformal_interval, conformal_level, fit_conformal
from .core import (
    CalibrationCurve,
    CalibrationError,
    EmpiricalErrorDistribution,
    EvaluationReport,
    PredictionRecord,
    PredictionSet,
    from_arrays,
    validate_predictions,
)
from .crude import CrudeModel, crude_cdf, crude_moments, crude_quantile, fit_crude
from .data import (
    KnnPredictor,
    SplitSpec,
    SyntheticConfig,
    SyntheticData,
    knn_predict,
    load_csv,
    split,
    synth_generate,
    write_csv,
)
from .metrics import (
    PitSample,
    calibration_curve,
    calibration_score,
    evaluate,
    pit_values,
    sharpness,
)
from .registry import fit, load_model, save_model

__version__ = "0.1.0"
