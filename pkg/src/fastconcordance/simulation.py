"""Data generators and Monte-Carlo population values for the simulation study.

Binary scenario: a success rate p ~ Beta(alpha, beta) is the prediction and
the response is a Binomial(n_trials, p) draw (Bernoulli for one trial).
Continuous scenario: (y, prediction) standard bivariate normal with
correlation rho. Every repetition draws from its own stream derived from the
master seed and the repetition index, so results do not depend on the order
in which repetitions are run.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import ContinuousDataset, ScoredPairs, split_binary
from .exact import continuous_pair_counts_sweep, discrete_pair_counts_rank, pairwise_diff_quantile


def rep_rng(seed: int, *index: int) -> np.random.Generator:
    """Independent generator for repetition ``index`` of master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, index)]))


@dataclass(frozen=True)
class BetaBinConfig:
    mu: float
    kappa: float
    n_trials: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.mu < 1.0:
            raise ValueError("mu must lie in (0, 1)")
        if not self.kappa > 0:
            raise ValueError("kappa must be > 0")
        if int(self.n_trials) < 1:
            raise ValueError("n_trials must be >= 1")
        if not (self.alpha > 1 and self.beta > 1):
            warnings.warn(
                f"Beta({self.alpha:g}, {self.beta:g}) is not unimodal (alpha or beta <= 1)",
                stacklevel=3,
            )

    @property
    def alpha(self) -> float:
        return self.mu * self.kappa

    @property
    def beta(self) -> float:
        return (1.0 - self.mu) * self.kappa


@dataclass(frozen=True)
class GaussianPairConfig:
    rho: float
    n: int
    seed: int = 0

    def __post_init__(self):
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")
        if int(self.n) < 1:
            raise ValueError("n must be >= 1")


def sample_beta_binomial(cfg: BetaBinConfig, n_samples: int, rng: np.random.Generator | None = None) -> ScoredPairs:
    rng = rng if rng is not None else rep_rng(cfg.seed)
    g1 = rng.standard_gamma(cfg.alpha, size=n_samples)
    g2 = rng.standard_gamma(cfg.beta, size=n_samples)
    p = g1 / (g1 + g2)
    if cfg.n_trials == 1:
        y = (rng.random(n_samples) < p).astype(np.float64)
    else:
        y = rng.binomial(cfg.n_trials, p).astype(np.float64)
    return ScoredPairs(y, p)


def betabin_pmf(x, alpha: float, beta: float, n: int):
    """Beta-binomial probability mass, evaluated through log-gamma."""
    if not (alpha > 0 and beta > 0) or int(n) < 0:
        raise ValueError("need alpha > 0, beta > 0 and n >= 0")
    x = np.asarray(x)
    if np.any((x < 0) | (x > n)) or np.any(x != np.floor(x)):
        raise ValueError("x must be an integer in [0, n]")
    x = x.astype(np.float64)
    logp = (
        gammaln(n + 1) + gammaln(alpha + beta) + gammaln(x + alpha) + gammaln(n - x + beta)
        - gammaln(x + 1) - gammaln(n - x + 1) - gammaln(alpha) - gammaln(beta) - gammaln(n + alpha + beta)
    )
    out = np.exp(logp)
    return float(out) if out.ndim == 0 else out


def sample_gaussian_pairs(cfg: GaussianPairConfig, rng: np.random.Generator | None = None) -> ScoredPairs:
    rng = rng if rng is not None else rep_rng(cfg.seed)
    y = rng.standard_normal(cfg.n)
    z = rng.standard_normal(cfg.n)
    p = cfg.rho * y + math.sqrt(1.0 - cfg.rho**2) * z
    return ScoredPairs(y, p)


def calibrate_nu(x_percents, inner_n: int = 10_000, inner_reps: int = 10, outer_reps: int = 10,
                 seed: int = 0) -> np.ndarray:
    """Thresholds nu below which x% of pairwise |y_i - y_j| of standard normals fall.

    For each of ``outer_reps`` rounds, ``inner_reps`` samples of ``inner_n``
    standard normals are drawn and the requested percentiles of all their
    pairwise absolute differences are averaged; the final value averages the
    round means.
    """
    pct = np.atleast_1d(np.asarray(x_percents, dtype=np.float64))
    if np.any((pct < 0) | (pct >= 100)):
        raise ValueError("percents must lie in [0, 100)")
    outer = np.empty((outer_reps, pct.size))
    for o in range(outer_reps):
        inner = np.empty((inner_reps, pct.size))
        for i in range(inner_reps):
            y = rep_rng(seed, o, i).standard_normal(inner_n)
            inner[i] = [pairwise_diff_quantile(y, p / 100.0) for p in pct]
        outer[o] = inner.mean(axis=0)
    return outer.mean(axis=0)


def population_c_discrete(cfg: BetaBinConfig, n_pop: int = 1_000_000, reps: int = 5) -> float:
    """Monte-Carlo mean of the exact C over ``reps`` samples of size ``n_pop``."""
    vals = []
    for r in range(reps):
        data = split_binary(sample_beta_binomial(cfg, n_pop, rep_rng(cfg.seed, r)))
        counts = discrete_pair_counts_rank(data.group_a, data.group_b)
        vals.append(counts.concordant / counts.comparable)
    return float(np.mean(vals))


def population_c_continuous(rho: float, nu: float, n_pop: int = 50_000, reps: int = 10, seed: int = 0) -> float:
    """Monte-Carlo mean of the exact C(nu) over ``reps`` bivariate-normal samples."""
    vals = []
    for r in range(reps):
        pairs = sample_gaussian_pairs(GaussianPairConfig(rho, n_pop, seed), rep_rng(seed, r))
        data = ContinuousDataset(pairs.response, pairs.prediction, nu)
        counts, _ = continuous_pair_counts_sweep(data.response, data.prediction, data.nu)
        vals.append(counts.concordant / counts.comparable)
    return float(np.mean(vals))
