"""Fitting a drifting-coefficient series: pooled vs worst-group estimation.

The scenario has two standard-normal predictors and coefficients (1, eta)
with eta drifting monotonically from 6 down to -4 across the sample.  The
pooled regression follows the average effect (1, 1) and its predictions turn
against the response once eta goes negative; the worst-group fit on
consecutive blocks keeps only the stable first coefficient.
"""

import numpy as np

from maximin import (
    PenaltyConfig,
    consecutive_blocks,
    cumulative_cross_product,
    fit_reweighted,
    gen_figure2,
    maximin_effect,
    pooled_effect,
)

n = 20_000
sim = gen_figure2(n, seed=7, sigma_noise=0.1)
ds = sim.dataset
print(f"{n} observations, eta drifting over "
      f"[{sim.realized_coeffs[:, 1].min():.2f}, "
      f"{sim.realized_coeffs[:, 1].max():.2f}]")
print("population answers:  pooled", pooled_effect(sim.support),
      " worst-group", np.round(maximin_effect(sim.support), 6))
print()

config = PenaltyConfig(q="l2", mode="penalized", lam=0.0)
fit_pool = fit_reweighted(ds, consecutive_blocks(n, 1), config)
fit_mm = fit_reweighted(ds, consecutive_blocks(n, 40), config)
print(f"pooled fit (1 block)      : {np.round(fit_pool.beta, 4)}")
print(f"worst-group fit (40 blocks): {np.round(fit_mm.beta, 4)} "
      f"in {fit_mm.iterations} reweighting rounds")
print()

print("per-group explained variance of the worst-group fit:")
print("  min {:.3f}   median {:.3f}   max {:.3f}".format(
    fit_mm.group_V.min(), np.median(fit_mm.group_V), fit_mm.group_V.max()))
print()


def slope_profile(beta):
    series = cumulative_cross_product(ds.Y, ds.X @ beta, standardize=True)
    c = np.concatenate([[0.0], series.cumsum])
    marks = np.linspace(0, n, 6).astype(int)
    return np.diff(c[marks])


print("cumulative cross-product slopes over five consecutive fifths")
print("(positive = predictions still helping):")
print("  pooled      :", np.round(slope_profile(fit_pool.beta), 1))
print("  worst-group :", np.round(slope_profile(fit_mm.beta), 1))
print()
print("the pooled profile collapses in the last fifth (eta < -2) while the")
print("worst-group profile stays positive throughout; this is the pattern to")
print("look for when deciding whether a pooled model can be trusted.")
