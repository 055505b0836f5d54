"""
End to end with a k-nearest-neighbour predictor
===============================================

No external model needed: k-NN gives a local mean and spread for each point.
Those are honest but poorly calibrated uncertainty estimates. Recalibration
runs on the calibration split and is scored on the test split.
"""

from crudecal import calibration_curve, calibration_score, fit_crude, from_arrays, pit_values, sharpness
from crudecal.baselines import IdentityModel
from crudecal.data import KnnPredictor, SplitSpec, SyntheticConfig, split, synth_generate

data = synth_generate(SyntheticConfig(6000, "student_t", (4.0,), seed=3))
train, cal, test = split(data, SplitSpec(seed=3, trials=1), 0)

knn = KnnPredictor(train.x, train.y, k=25)
cal_set = from_arrays(*knn.predict(cal.x), cal.y)
test_set = from_arrays(*knn.predict(test.x), test.y)

for name, model in [("uncalibrated", IdentityModel()), ("CRUDE", fit_crude(cal_set))]:
    score = calibration_score(calibration_curve(test_set, model))
    ks = pit_values(test_set, model).ks_test()
    print(f"{name:<13} RMSE={score:.4f} sharpness={sharpness(test_set, model):.4f} KS p={ks.pvalue:.3f}")
