"""Exact and fast approximate concordance probability (C-index / AUC)."""
from .clustering import KMeansConfig, kmeans_1d, kmeans_2d, within_cluster_sse
from .core import (
    AllTied,
    CellCounts,
    ConcordanceError,
    ConcordanceEstimate,
    ContinuousDataset,
    CsvFormat,
    EmptyGroup,
    EmptyInput,
    EstimationError,
    GridSpec,
    GroupedBinaryData,
    InputError,
    Method,
    NoComparableClusters,
    NoComparablePairs,
    NoComparableRegions,
    NonBinaryResponse,
    NonFiniteValue,
    ParseError,
    ScoredPair,
    ScoredPairs,
    WeightedClusterSet,
    ingest_csv,
    split_binary,
    write_csv,
)
from .exact import (
    PairCounts,
    exact_continuous,
    exact_continuous_sweep,
    exact_discrete_brute,
    exact_discrete_rank,
    pairwise_diff_ecdf,
    pairwise_diff_quantile,
)
from .kmeans_estimator import kmeans_continuous, kmeans_discrete
from .marginal import (
    build_cell_counts,
    marginal_continuous,
    marginal_continuous_q,
    marginal_discrete,
    percentile_boundaries,
)
from .simulation import (
    BetaBinConfig,
    GaussianPairConfig,
    betabin_pmf,
    calibrate_nu,
    population_c_continuous,
    population_c_discrete,
    sample_beta_binomial,
    sample_gaussian_pairs,
)
from .trapezium import ROCCurve, auc_trapezium, roc_points, trapezium_auc

__version__ = "0.1.0"
