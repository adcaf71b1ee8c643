"""Concordance over cluster representatives instead of raw observations.

Binary outcome: each group is clustered on its predictions separately and
every centroid of B is compared with every centroid of A, each comparison
weighted by the product of the two cluster weights. Continuous outcome:
(y, prediction) points are clustered jointly and cluster pairs are compared
under the ``y_hi - y_lo > nu`` gate.

Pair masses are accumulated from integer member counts and normalised at the
end, so a clustering that is lossless (one cluster per distinct value)
reproduces the exact estimator bit for bit.
"""
from __future__ import annotations

import numpy as np

from .clustering import KMeansConfig, kmeans_1d, kmeans_2d
from .core import (
    AllTied,
    ConcordanceEstimate,
    ContinuousDataset,
    GroupedBinaryData,
    Method,
    NoComparableClusters,
    WeightedClusterSet,
    concordance_ratio,
    timed,
)
from .exact import continuous_pair_counts_brute, discrete_pair_counts_rank


def _group_config(cfg: KMeansConfig, group: int) -> KMeansConfig:
    seed = np.random.SeedSequence([int(cfg.seed), group])
    return KMeansConfig(k=cfg.k, max_iters=cfg.max_iters, rel_tol=cfg.rel_tol, seed=seed, init=cfg.init)


def concordance_from_clusters_discrete(clusters_a: WeightedClusterSet, clusters_b: WeightedClusterSet,
                                       ties: str = "exclude", method=Method.KMEANS) -> ConcordanceEstimate:
    counts = discrete_pair_counts_rank(
        clusters_a.centroids, clusters_b.centroids, clusters_a.counts, clusters_b.counts
    )
    if counts.comparable == 0 and (ties == "exclude" or counts.tied == 0):
        raise AllTied("every pair of centroids is tied")
    norm = clusters_a.total * clusters_b.total
    return ConcordanceEstimate(
        c_hat=concordance_ratio(counts.concordant, counts.discordant, counts.tied, ties),
        concordant_mass=counts.concordant / norm,
        discordant_mass=counts.discordant / norm,
        tied_mass=counts.tied / norm,
        method=method,
        ties=ties,
        diagnostics={"pair_counts": counts, "k_a": len(clusters_a), "k_b": len(clusters_b)},
    )


@timed
def kmeans_discrete(data: GroupedBinaryData, cfg: KMeansConfig, ties: str = "exclude") -> ConcordanceEstimate:
    ca = kmeans_1d(data.group_a, _group_config(cfg, 0))
    cb = kmeans_1d(data.group_b, _group_config(cfg, 1))
    est = concordance_from_clusters_discrete(ca, cb, ties)
    est.diagnostics.update(clusters_a=ca, clusters_b=cb)
    return est


def concordance_from_clusters_continuous(clusters: WeightedClusterSet, nu: float,
                                         ties: str = "exclude") -> ConcordanceEstimate:
    """Weighted cluster-pair concordance under the ``y_hi - y_lo > nu`` gate.

    The denominator excludes centroid pairs with exactly equal predictions so
    that c_hat = conc / (conc + disc). ``gated_mass`` in the diagnostics is the
    total including those tied pairs, and ``c_hat_tied_denominator`` the
    ratio that uses it.
    """
    y = clusters.centroids[:, 0]
    p = clusters.centroids[:, 1]
    counts, gated = continuous_pair_counts_brute(y, p, nu, weights=clusters.counts)
    if gated == 0:
        raise NoComparableClusters(f"no pair of clusters differs by more than nu={nu} in y")
    if counts.comparable == 0 and (ties == "exclude" or counts.tied == 0):
        raise AllTied("every nu-comparable cluster pair has tied predictions")
    # masses are weighted pair counts, on the same scale as the exact n_C(nu)
    return ConcordanceEstimate(
        c_hat=concordance_ratio(counts.concordant, counts.discordant, counts.tied, ties),
        concordant_mass=counts.concordant,
        discordant_mass=counts.discordant,
        tied_mass=counts.tied,
        method=Method.KMEANS,
        ties=ties,
        diagnostics={
            "pair_counts": counts,
            "k": len(clusters),
            "gated_mass": gated,
            "c_hat_tied_denominator": counts.concordant / gated,
        },
    )


@timed
def kmeans_continuous(data: ContinuousDataset, cfg: KMeansConfig, ties: str = "exclude",
                      standardize: bool = True) -> ConcordanceEstimate:
    clusters = kmeans_2d(np.column_stack([data.response, data.prediction]), cfg, standardize=standardize)
    est = concordance_from_clusters_continuous(clusters, data.nu, ties)
    est.diagnostics["clusters"] = clusters
    return est
