"""
Concordance for a binary outcome
================================

Draw a beta-binomial sample, then compare the exact C-index with the
trapezium-rule AUC, the k-means approximation and the marginal grid
approximation.
"""

import numpy as np

from fastconcordance import (
    BetaBinConfig,
    GridSpec,
    KMeansConfig,
    exact_discrete_brute,
    exact_discrete_rank,
    kmeans_discrete,
    marginal_discrete,
    sample_beta_binomial,
    split_binary,
    trapezium_auc,
)

# success probabilities p ~ Beta(5, 45) act as the predictions, y ~ Bernoulli(p)
pairs = sample_beta_binomial(BetaBinConfig(mu=0.10, kappa=50), 200_000, np.random.default_rng(0))
data = split_binary(pairs)
print(f"{data.group_a.size} zeros, {data.group_b.size} ones")

###############################################################################
# Exact value: the sort-based count needs O(n log n) time, while the
# brute-force count looks at every cross pair. Both give the same integers.
exact = exact_discrete_rank(data)
print(f"exact C          {exact.c_hat:.6f}  ({exact.elapsed * 1e3:.1f} ms)")

small = split_binary(pairs[:20_000])
assert exact_discrete_brute(small).c_hat == exact_discrete_rank(small).c_hat

###############################################################################
# The trapezium rule over the ROC curve. Without tied predictions it matches
# the exact value to rounding.
auc = trapezium_auc(data)
print(f"trapezium AUC    {auc.c_hat:.6f}  ({auc.elapsed * 1e3:.1f} ms)")

###############################################################################
# Approximations: more clusters or grid boundaries shrink the bias.
for k in (10, 100, 1000):
    est = kmeans_discrete(data, KMeansConfig(k=k, seed=1))
    print(f"k-means k={k:<5d} {est.c_hat:.6f}  bias {est.c_hat - exact.c_hat:+.5f}  ({est.elapsed:.2f} s)")
for q in (10, 100, 1000):
    est = marginal_discrete(data, q)
    print(f"marginal q={q:<4d} {est.c_hat:.6f}  bias {est.c_hat - exact.c_hat:+.5f}  ({est.elapsed * 1e3:.1f} ms)")

###############################################################################
# A grid with every distinct prediction as a boundary loses nothing.
rounded = split_binary(type(pairs)(pairs.response, np.round(pairs.prediction, 3)))
grid = GridSpec(np.unique(np.concatenate([rounded.group_a, rounded.group_b])))
print("lossless grid equals exact:", marginal_discrete(rounded, grid).c_hat == exact_discrete_rank(rounded).c_hat)
