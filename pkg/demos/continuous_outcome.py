"""
Concordance for a continuous outcome
====================================

With a continuous response a pair only counts when the two responses differ
by more than a threshold nu. This script compares the exact C(nu) with the
k-means and marginal approximations and shows how a too-large nu leaves the
grid method with nothing to compare.
"""

import numpy as np

from fastconcordance import (
    ContinuousDataset,
    KMeansConfig,
    NoComparableRegions,
    calibrate_nu,
    exact_continuous_sweep,
    kmeans_continuous,
    marginal_continuous_q,
)

rng = np.random.default_rng(7)
n, rho = 50_000, 0.25
y = rng.standard_normal(n)
prediction = rho * y + np.sqrt(1 - rho**2) * rng.standard_normal(n)

###############################################################################
# Choose nu so that 20% of all pairwise response gaps fall below it. For
# standard normals this is close to 0.358.
nu = float(calibrate_nu([20], inner_n=10_000, inner_reps=3, outer_reps=3)[0])
print(f"nu for 20% = {nu:.4f}")
data = ContinuousDataset(y, prediction, nu)

###############################################################################
# Exact value by a sweep over the sorted responses.
exact = exact_continuous_sweep(data)
print(f"exact C(nu)      {exact.c_hat:.5f}  ({exact.elapsed * 1e3:.1f} ms)")

for k in (10, 100):
    est = kmeans_continuous(data, KMeansConfig(k=k, seed=3))
    print(f"k-means k={k:<4d}  {est.c_hat:.5f}  bias {est.c_hat - exact.c_hat:+.5f}  ({est.elapsed:.2f} s)")
for q in (10, 20, 100):
    est = marginal_continuous_q(data, q)
    print(f"marginal q={q:<3d}  {est.c_hat:.5f}  bias {est.c_hat - exact.c_hat:+.5f}  ({est.elapsed * 1e3:.1f} ms)")

###############################################################################
# Once nu exceeds the distance between the outermost boundaries, no pair of
# grid regions is far enough apart.
try:
    marginal_continuous_q(data.with_nu(10.0), 100)
except NoComparableRegions as exc:
    print("NoComparableRegions:", exc)
