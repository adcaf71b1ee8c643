"""Exact concordance estimators.

Binary outcomes: a brute-force cross-pair scan and an O(n log n) rank
count that yields the same integer triple. Continuous outcomes: an O(n^2)
pairwise scan (the reference) and an O(n log n) sweep over a Fenwick tree.

Prediction ties are detected with exact floating-point equality. Continuous
pairs are comparable only when ``y_hi - y_lo > nu`` (strict), so with
``nu = 0`` equal responses are never compared.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .core import (
    AllTied,
    ConcordanceEstimate,
    ContinuousDataset,
    GroupedBinaryData,
    InputError,
    Method,
    NoComparablePairs,
    concordance_ratio,
    timed,
)

_BLOCK = 1 << 22  # cells per broadcast block in the O(n^2) scans


@dataclass(frozen=True)
class PairCounts:
    """Integer pair tallies; ``comparable`` excludes prediction ties."""

    concordant: int
    discordant: int
    tied: int = 0

    @property
    def comparable(self) -> int:
        return self.concordant + self.discordant

    def __add__(self, other: "PairCounts") -> "PairCounts":
        return PairCounts(
            self.concordant + other.concordant,
            self.discordant + other.discordant,
            self.tied + other.tied,
        )


def _estimate(counts: PairCounts, method: Method, ties: str, **diag) -> ConcordanceEstimate:
    if counts.comparable == 0 and (ties == "exclude" or counts.tied == 0):
        raise AllTied("every comparable pair has tied predictions")
    c = concordance_ratio(counts.concordant, counts.discordant, counts.tied, ties)
    return ConcordanceEstimate(
        c_hat=c,
        concordant_mass=counts.concordant,
        discordant_mass=counts.discordant,
        tied_mass=counts.tied,
        method=method,
        ties=ties,
        diagnostics={"pair_counts": counts, **diag},
    )


# --- binary outcome ----------------------------------------------------------


def discrete_pair_counts_brute(group_a, group_b) -> PairCounts:
    a = np.asarray(group_a, dtype=np.float64)
    b = np.asarray(group_b, dtype=np.float64)
    conc = disc = tied = 0
    step = max(1, _BLOCK // max(1, a.size))
    for start in range(0, b.size, step):
        diff = b[start : start + step, None] - a[None, :]
        conc += int(np.count_nonzero(diff > 0))
        disc += int(np.count_nonzero(diff < 0))
        tied += int(np.count_nonzero(diff == 0))
    return PairCounts(conc, disc, tied)


def discrete_pair_counts_rank(group_a, group_b, weights_a=None, weights_b=None) -> PairCounts:
    """Cross-pair tallies by sorting A and binary-searching each B value.

    With integer ``weights_*`` each value stands for that many observations.
    """
    a = np.asarray(group_a, dtype=np.float64)
    b = np.asarray(group_b, dtype=np.float64)
    order = np.argsort(a, kind="stable")
    a_sorted = a[order]
    if weights_a is None:
        cum_a = np.arange(a.size + 1, dtype=np.int64)
    else:
        cum_a = np.concatenate(([0], np.cumsum(np.asarray(weights_a, dtype=np.int64)[order])))
    wb = np.ones(b.size, dtype=np.int64) if weights_b is None else np.asarray(weights_b, dtype=np.int64)
    below = cum_a[np.searchsorted(a_sorted, b, side="left")]
    at_or_below = cum_a[np.searchsorted(a_sorted, b, side="right")]
    total_a = int(cum_a[-1])
    conc = int(np.dot(wb, below))
    tied = int(np.dot(wb, at_or_below - below))
    disc = int(wb.sum()) * total_a - conc - tied
    return PairCounts(conc, disc, tied)


@timed
def exact_discrete_brute(data: GroupedBinaryData, ties: str = "exclude") -> ConcordanceEstimate:
    """Exact C over all |A|*|B| cross pairs by direct comparison."""
    counts = discrete_pair_counts_brute(data.group_a, data.group_b)
    return _estimate(counts, Method.EXACT_BRUTE, ties)


@timed
def exact_discrete_rank(data: GroupedBinaryData, ties: str = "exclude") -> ConcordanceEstimate:
    """Exact C in O(n log n); equal to :func:`exact_discrete_brute` on every input."""
    counts = discrete_pair_counts_rank(data.group_a, data.group_b)
    return _estimate(counts, Method.EXACT_RANK, ties)


# --- continuous outcome ------------------------------------------------------


def continuous_pair_counts_brute(y, p, nu: float, weights=None) -> tuple[PairCounts, int]:
    """Tally every unordered pair oriented so that ``y_hi - y_lo > nu``.

    Returns the tallies and the number of outcome-comparable pairs (ties
    included). ``weights`` are integer multiplicities per row.
    """
    y = np.asarray(y, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    n = y.size
    w = None if weights is None else np.asarray(weights, dtype=np.int64)
    conc = disc = tied = 0
    step = max(1, _BLOCK // max(1, n))
    for start in range(0, n, step):
        sl = slice(start, start + step)
        gap = (y[sl, None] - y[None, :]) > nu
        dp = p[sl, None] - p[None, :]
        if w is None:
            conc += int(np.count_nonzero(gap & (dp > 0)))
            disc += int(np.count_nonzero(gap & (dp < 0)))
            tied += int(np.count_nonzero(gap & (dp == 0)))
        else:
            ww = w[sl, None] * w[None, :]
            conc += int(ww[gap & (dp > 0)].sum())
            disc += int(ww[gap & (dp < 0)].sum())
            tied += int(ww[gap & (dp == 0)].sum())
    counts = PairCounts(conc, disc, tied)
    return counts, conc + disc + tied


@numba.njit(cache=True)
def _sweep(y_sorted, rank, nu, n_ranks):
    # rank: 1-based dense rank of each prediction, aligned with y_sorted
    n = y_sorted.size
    tree = np.zeros(n_ranks + 1, dtype=np.int64)
    conc = 0
    disc = 0
    tied = 0
    ptr = 0
    for i in range(n):
        yi = y_sorted[i]
        while ptr < n and yi - y_sorted[ptr] > nu:
            j = rank[ptr]
            while j <= n_ranks:
                tree[j] += 1
                j += j & (-j)
            ptr += 1
        r = rank[i]
        below = 0
        j = r - 1
        while j > 0:
            below += tree[j]
            j -= j & (-j)
        at_or_below = 0
        j = r
        while j > 0:
            at_or_below += tree[j]
            j -= j & (-j)
        conc += below
        tied += at_or_below - below
        disc += ptr - at_or_below
    return conc, disc, tied


def continuous_pair_counts_sweep(y, p, nu: float) -> tuple[PairCounts, int]:
    """Same tallies as :func:`continuous_pair_counts_brute` in O(n log n).

    Sorting by y makes the set of partners with ``y_i - y_j > nu`` a prefix
    that only grows as ``y_i`` increases, so one pointer and a Fenwick tree
    over prediction ranks suffice.
    """
    y = np.asarray(y, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    order = np.argsort(y, kind="stable")
    ys = np.ascontiguousarray(y[order])
    uniq, inv = np.unique(p, return_inverse=True)
    rank = (inv.reshape(-1)[order] + 1).astype(np.int64)
    conc, disc, tied = _sweep(ys, rank, float(nu), int(uniq.size))
    counts = PairCounts(int(conc), int(disc), int(tied))
    return counts, counts.comparable + counts.tied


def _continuous_estimate(counts, n_outcome_comparable, method, ties, nu) -> ConcordanceEstimate:
    if n_outcome_comparable == 0:
        raise NoComparablePairs(f"no pair of responses differs by more than nu={nu}")
    return _estimate(counts, method, ties, outcome_comparable=n_outcome_comparable)


@timed
def exact_continuous(data: ContinuousDataset, ties: str = "exclude") -> ConcordanceEstimate:
    """Exact C(nu) by scanning all n(n-1)/2 pairs."""
    counts, total = continuous_pair_counts_brute(data.response, data.prediction, data.nu)
    return _continuous_estimate(counts, total, Method.EXACT_BRUTE, ties, data.nu)


@timed
def exact_continuous_sweep(data: ContinuousDataset, ties: str = "exclude") -> ConcordanceEstimate:
    """Exact C(nu) in O(n log n); identical tallies to :func:`exact_continuous`."""
    counts, total = continuous_pair_counts_sweep(data.response, data.prediction, data.nu)
    return _continuous_estimate(counts, total, Method.EXACT_RANK, ties, data.nu)


# --- pairwise absolute differences --------------------------------------------


@dataclass(frozen=True)
class PairwiseDiffECDF:
    """Distribution of |y_i - y_j| over all unordered pairs, as integer pair counts."""

    values: np.ndarray  # sorted distinct absolute differences
    counts: np.ndarray  # pairs at each difference
    total: int

    def cdf(self, t) -> np.ndarray:
        """Fraction of pairs with difference <= t."""
        cum = np.concatenate(([0], np.cumsum(self.counts)))
        return cum[np.searchsorted(self.values, t, side="right")] / self.total

    def quantile(self, p: float) -> float:
        """Smallest difference d with cdf(d) >= p; p = 0 gives 0."""
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if p == 0.0:
            return 0.0
        rank = int(np.ceil(p * self.total))
        cum = np.cumsum(self.counts)
        return float(self.values[np.searchsorted(cum, rank, side="left")])


def pairwise_diff_ecdf(responses) -> PairwiseDiffECDF:
    """ECDF of pairwise absolute differences computed on grouped unique values.

    Memory is quadratic in the number of *distinct* responses, which is what
    makes heavily tied data (fares, counts) cheap.
    """
    y = np.asarray(responses, dtype=np.float64)
    if y.size < 2:
        raise InputError("need at least 2 responses")
    uniq, w = np.unique(y, return_counts=True)
    w = w.astype(np.int64)
    iu, ju = np.triu_indices(uniq.size, k=1)
    diffs = uniq[ju] - uniq[iu]
    freqs = w[iu] * w[ju]
    zero_pairs = int((w * (w - 1) // 2).sum())
    diffs = np.concatenate(([0.0], diffs))
    freqs = np.concatenate(([zero_pairs], freqs))
    values, inv = np.unique(diffs, return_inverse=True)
    counts = np.zeros(values.size, dtype=np.int64)
    np.add.at(counts, inv.reshape(-1), freqs)
    keep = counts > 0
    total = y.size * (y.size - 1) // 2
    assert int(counts.sum()) == total
    return PairwiseDiffECDF(values[keep], counts[keep], total)


def _pairs_at_most(y_sorted: np.ndarray, t: float) -> int:
    idx = np.searchsorted(y_sorted, y_sorted + t, side="right")
    return int((idx - np.arange(1, y_sorted.size + 1)).sum())


def pairwise_diff_quantile(responses, p: float) -> float:
    """The p-quantile of |y_i - y_j| without materialising the n(n-1)/2 differences.

    Bisects on the difference value, counting pairs below a trial value with
    one ``searchsorted`` over the sorted responses, then picks the exact
    order statistic among the handful of differences left in the bracket.
    """
    y = np.sort(np.asarray(responses, dtype=np.float64))
    n = y.size
    if n < 2:
        raise InputError("need at least 2 responses")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p == 0.0:
        return 0.0
    total = n * (n - 1) // 2
    rank = max(1, int(np.ceil(p * total)))
    n_lo = _pairs_at_most(y, 0.0)
    if n_lo >= rank:
        return 0.0
    # invariant: count(<= lo) < rank <= count(<= hi)
    lo, hi = 0.0, float(y[-1] - y[0])
    n_hi = _pairs_at_most(y, hi)
    while n_hi < rank:  # y_i + (y_max - y_min) can round below y_max
        hi = float(np.nextafter(hi, np.inf))
        n_hi = _pairs_at_most(y, hi)
    while n_hi - n_lo > 4 * n:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            return hi
        c = _pairs_at_most(y, mid)
        if c >= rank:
            hi, n_hi = mid, c
        else:
            lo, n_lo = mid, c
    # enumerate differences in (lo, hi]
    start = np.searchsorted(y, y + lo, side="right")
    stop = np.searchsorted(y, y + hi, side="right")
    sizes = np.maximum(stop - start, 0)
    src = np.repeat(np.arange(n), sizes)
    offs = np.arange(sizes.sum()) - np.repeat(np.cumsum(sizes) - sizes, sizes)
    cand = np.sort(y[start[src] + offs] - y[src])
    return float(cand[rank - n_lo - 1])
