"""
Split conformal intervals are CRUDE intervals
=============================================

With the signed score ``(y - mu) / sigma`` a split conformal interval at
levels ``(p_l, p_u)`` picks the same order statistics CRUDE does, so both
give identical bounds.
"""

import numpy as np

from crudecal import conformal_interval, crude_quantile, fit_conformal, fit_crude
from crudecal.data import SyntheticConfig, synth_generate

cal = synth_generate(SyntheticConfig(2000, "student_t", seed=1)).predictions
test = synth_generate(SyntheticConfig(5000, "student_t", seed=2)).predictions

crude, conformal = fit_crude(cal), fit_conformal(cal)
pred = (1.3, 0.7)
print("conformal:", conformal_interval(conformal, pred, 0.05, 0.95))
print("CRUDE:    ", (crude_quantile(crude, pred, 0.05), crude_quantile(crude, pred, 0.95)))

lower, upper = conformal.interval(test.mu, test.sigma, 0.05, 0.95)
print("empirical coverage of the 90% interval:", np.mean((test.y >= lower) & (test.y <= upper)))
