"""
Recalibrating a black-box model with empirical z-scores
=======================================================

A model reports a shift ``mu`` and a scale ``sigma`` for every input. We
collect ``(y - mu) / sigma`` on a held-out calibration set and use their
empirical distribution as the noise law for new predictions.
"""

import numpy as np

from crudecal import crude_moments, crude_quantile, fit_crude, validate_predictions

# A tiny calibration set whose z-scores are exactly -1, 0 and 1.
cal = validate_predictions([(0.0, 1.0, -1.0), (0.0, 1.0, 0.0), (0.0, 1.0, 1.0)])
model = fit_crude(cal)
print("sorted z-scores:", model.dist.z_sorted)
print("mean / variance of z:", model.dist.mean_z, model.dist.var_z)

# Quantiles are a single lookup: z_sorted[floor(p * L)], shifted and scaled.
for p in (0.05, 0.5, 0.9):
    print(f"q({p}) for mu=5, sigma=2:", crude_quantile(model, (5.0, 2.0), p))

mean, var = crude_moments(model, (5.0, 2.0))
print("predictive mean and variance:", mean, var)

# %%
# Queries broadcast, so scoring a whole test set is one call.
rng = np.random.default_rng(0)
mu, sigma = rng.normal(size=5), rng.uniform(0.5, 2.0, 5)
print(model.quantile(mu, sigma, 0.95))
