"""The maximal-penalty shortcut: directions from cross-products alone.

As the penalty grows toward its vanishing threshold, the penalized
worst-group estimator's direction converges to the solution of a small
linear program that touches the data only through the per-group
cross-products X_g'Y_g / n_g.  Memory is O(pG) instead of O(np), which makes
million-coordinate problems routine.
"""

import time

import numpy as np

from maximin import (
    Dataset,
    PenaltyConfig,
    consecutive_blocks,
    fit_maximal_penalty,
    fit_reweighted,
    lambda_max,
    rescale,
    rng_from_seed,
)

cfg = PenaltyConfig(q="l1", mode="maximal")

# small instance: agreement with the penalized route near the threshold
rng = rng_from_seed(5)
p, G, n_g = 6, 3, 200
b0 = np.zeros(p)
b0[0] = 1.2
bs = [b0 + 0.15 * rng.standard_normal(p) for _ in range(G)]
X = rng.standard_normal((G * n_g, p))
Y = np.concatenate([X[g * n_g:(g + 1) * n_g] @ bs[g] for g in range(G)])
ds = Dataset(X=X, Y=Y)
spec = consecutive_blocks(G * n_g, G)

crosses = [X[g * n_g:(g + 1) * n_g].T @ Y[g * n_g:(g + 1) * n_g] / n_g
           for g in range(G)]
direction = fit_maximal_penalty(crosses, cfg)
lam = lambda_max(ds, spec, "l1")
near = fit_reweighted(ds, spec, PenaltyConfig(q="l1", mode="penalized",
                                              lam=0.99 * lam, tol=1e-10,
                                              max_iter=300))
cos = direction @ near.beta / (np.linalg.norm(direction)
                               * np.linalg.norm(near.beta))
print(f"direction from the linear program : {np.round(direction, 4)}")
print(f"penalized fit at 99% of threshold : {np.round(near.beta, 5)}")
print(f"cosine similarity                 : {cos:.6f}")

scale = rescale(direction, ds, spec)
print(f"optimal prediction scale          : {scale:.4f} "
      f"(coefficients = scale * direction)")
print()

# large instance: a million coordinates from three cross-product vectors,
# each group aligned with its own strong coordinate plus a weak shared one
p_big, G_big = 1_000_000, 3
rng = rng_from_seed(99)
C = rng.standard_normal((G_big, p_big)) * 0.05
C[:, 0] = 0.52
for g in range(G_big):
    C[g, g + 1] = 1.4 + 0.3 * g
t0 = time.time()
beta_big = fit_maximal_penalty(C, cfg)
elapsed = time.time() - t0
nz = np.where(np.abs(beta_big) > 1e-12)[0]
print(f"p = {p_big:,}, G = {G_big}: solved in {elapsed:.2f}s")
print(f"  selected coordinates {nz.tolist()} with values "
      f"{np.round(beta_big[nz], 4).tolist()}")
print(f"  every group alignment >= 1: {bool(np.all(C @ beta_big >= 1 - 1e-9))}")
print()
print("the design matrix for that instance would occupy hundreds of")
print("gigabytes; the program above only ever saw three vectors.")
