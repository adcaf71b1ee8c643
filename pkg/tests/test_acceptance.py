"""Acceptance criteria, each checked at its stated tolerance.

Every test logs a PASS/FAIL line (shown in the pytest terminal summary); run
this file directly with ``python tests/test_acceptance.py`` to print the lines
without pytest.
"""
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from acceptance_log import record  # noqa: E402

from fastconcordance.bench import bench_scaling, method_grid, simulate_continuous, simulate_discrete, summarize
from fastconcordance.cli import main as cli_main
from fastconcordance.clustering import KMeansConfig, kmeans_1d
from fastconcordance.core import (
    AllTied,
    ContinuousDataset,
    GridSpec,
    GroupedBinaryData,
    NoComparableRegions,
    ScoredPairs,
    write_csv,
)
from fastconcordance.exact import (
    discrete_pair_counts_brute,
    discrete_pair_counts_rank,
    exact_continuous,
    exact_discrete_rank,
)
from fastconcordance.kmeans_estimator import concordance_from_clusters_discrete, kmeans_continuous
from fastconcordance.marginal import build_cell_counts, marginal_continuous, marginal_discrete, percentile_boundaries
from fastconcordance.simulation import BetaBinConfig, calibrate_nu, population_c_continuous, population_c_discrete
from fastconcordance.trapezium import trapezium_auc

pytestmark = pytest.mark.acceptance

_POPULATION = {}


def discrete_population(mu, kappa):
    key = (mu, kappa)
    if key not in _POPULATION:
        _POPULATION[key] = population_c_discrete(BetaBinConfig(mu, kappa), n_pop=1_000_000, reps=5)
    return _POPULATION[key]


def continuous_population(rho, nu):
    key = ("c", rho, nu)
    if key not in _POPULATION:
        _POPULATION[key] = population_c_continuous(rho, nu, n_pop=50_000, reps=10)
    return _POPULATION[key]


def check(criterion, ok, detail):
    record(criterion, bool(ok), detail)
    assert ok, detail


def random_binary(rng, n_max, tied):
    n = int(rng.integers(2, n_max + 1))
    n_a = int(rng.integers(1, n))
    scores = rng.integers(0, max(2, n // 10), n) / 7.0 if tied else rng.standard_normal(n)
    return GroupedBinaryData(scores[:n_a], scores[n_a:] + (0.3 if not tied else 0.0))


def test_c01_rank_equals_brute():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    mismatches = 0
    for i in range(500):
        d = random_binary(rng, 2000, tied=i % 2 == 0)
        brute = discrete_pair_counts_brute(d.group_a, d.group_b)
        rank = discrete_pair_counts_rank(d.group_a, d.group_b)
        same = (brute.concordant, brute.discordant, brute.comparable) == \
            (rank.concordant, rank.discordant, rank.comparable)
        mismatches += not same
    elapsed = time.perf_counter() - t0
    check("1 rank == brute (500 datasets)", mismatches == 0 and elapsed < 10,
          f"{mismatches} mismatches, {elapsed:.2f}s (limit 10s)")


def test_c02_trapezium_identity():
    rng = np.random.default_rng(202)
    worst_free = worst_tied = 0.0
    for _ in range(100):
        d = random_binary(rng, 2000, tied=False)
        worst_free = max(worst_free, abs(trapezium_auc(d).c_hat - exact_discrete_rank(d).c_hat))
        t = random_binary(rng, 2000, tied=True)
        worst_tied = max(worst_tied, abs(trapezium_auc(t).c_hat - exact_discrete_rank(t, ties="half").c_hat))
    check("2 trapezium identity", worst_free <= 1e-12 and worst_tied <= 1e-12,
          f"max |AUC - C| tie-free {worst_free:.2e}, tied vs half-ties {worst_tied:.2e} (tol 1e-12)")


def test_c03_degeneracy_to_exact():
    rng = np.random.default_rng(303)
    bad = []
    for i in range(100):
        d = random_binary(rng, 300, tied=True)
        ca = kmeans_1d(d.group_a, KMeansConfig(k=np.unique(d.group_a).size, seed=i))
        cb = kmeans_1d(d.group_b, KMeansConfig(k=np.unique(d.group_b).size, seed=i))
        try:
            ref = exact_discrete_rank(d).c_hat
        except AllTied:
            continue
        if concordance_from_clusters_discrete(ca, cb).c_hat != ref:
            bad.append(("kmeans_discrete", i))
        grid = GridSpec(np.unique(np.concatenate([d.group_a, d.group_b])))
        if marginal_discrete(d, grid).c_hat != ref:
            bad.append(("marginal_discrete", i))
        n = int(rng.integers(20, 301))
        y = rng.standard_normal(n)
        cd = ContinuousDataset(y, y + rng.standard_normal(n), nu=float(rng.choice([0.0, 0.3])))
        if kmeans_continuous(cd, KMeansConfig(k=n, seed=i)).c_hat != exact_continuous(cd).c_hat:
            bad.append(("kmeans_continuous", i))
    check("3 degeneracy to exact (100 datasets)", not bad, f"{len(bad)} inexact cases {bad[:3]}")


def test_c04_discrete_population():
    t0 = time.perf_counter()
    targets = {15: 0.7234, 50: 0.6297, 150: 0.5762}
    got = {k: discrete_population(0.10, k) for k in targets}
    lo, hi = discrete_population(0.25, 50), discrete_population(0.75, 50)
    elapsed = time.perf_counter() - t0
    within = all(abs(got[k] - v) <= 0.01 for k, v in targets.items())
    ok = within and abs(lo - hi) <= 0.005 and elapsed < 120
    detail = ", ".join(f"kappa={k}: {got[k]:.4f} (target {v})" for k, v in targets.items())
    check("4 discrete population values", ok,
          f"{detail}; mu 0.25 vs 0.75: {lo:.4f} vs {hi:.4f}; {elapsed:.1f}s")


def test_c05_continuous_population():
    t0 = time.perf_counter()
    nus = (0.0, 0.3583, 0.7416)
    zero = [continuous_population(0.0, nu) for nu in nus]
    half = continuous_population(0.5, 0.0)
    high = continuous_population(0.75, 0.7416)
    monotone = all(
        np.all(np.diff([continuous_population(rho, nu) for rho in (0.0, 0.25, 0.5, 0.75)]) > 0) for nu in nus
    )
    elapsed = time.perf_counter() - t0
    ok = (all(abs(z - 0.5) <= 0.005 for z in zero) and abs(half - 0.6666) <= 0.008
          and abs(high - 0.8747) <= 0.008 and monotone and elapsed < 120)
    check("5 continuous population values", ok,
          f"rho=0: {[round(z, 4) for z in zero]}, (0.5,0): {half:.4f}, (0.75,0.7416): {high:.4f}, "
          f"monotone in rho: {monotone}; {elapsed:.1f}s")


def test_c06_nu_calibration():
    t0 = time.perf_counter()
    nu20, nu40 = calibrate_nu([20, 40], inner_n=10_000, inner_reps=10, outer_reps=10)
    elapsed = time.perf_counter() - t0
    ok = abs(nu20 - 0.3583) <= 0.004 and abs(nu40 - 0.7416) <= 0.008 and elapsed < 60
    check("6 nu calibration", ok, f"x=20 -> {nu20:.4f}, x=40 -> {nu40:.4f}; {elapsed:.1f}s")


def test_c07_discrete_bias_trends():
    t0 = time.perf_counter()
    qs = [10, 20, 100, 500, 1000]
    ks = [100, 500, 1000]
    pop = discrete_population(0.10, 50)
    recs = simulate_discrete(0.10, 50, 50_000, 100, method_grid(["marginal", "kmeans"], ks, qs), population=pop)
    rows = {r["method"]: r for r in summarize(recs)}
    elapsed = time.perf_counter() - t0
    marg = [rows[f"marginal(q={q})"]["bias_mean"] for q in qs]
    km = [rows[f"kmeans(k={k})"]["bias_mean"] for k in ks]
    targets = [0.0116, 0.0060, 0.0012, 0.0002, 0.0000]
    decreasing = all(a > b for a, b in zip(marg, marg[1:]))
    close = all(abs(b - t) <= 0.002 for b, t in zip(marg, targets))
    km_ok = all(abs(b) <= 0.002 for b in km)
    check("7 discrete bias trends", decreasing and close and km_ok and elapsed < 600,
          f"marginal {[round(b, 4) for b in marg]} vs {targets}; kmeans k={ks}: {[round(b, 4) for b in km]}; "
          f"{elapsed:.0f}s")


def test_c08_continuous_bias_trends():
    qs = [10, 20, 100]
    ks = [100, 500, 1000]
    nu = 0.3583
    pop = continuous_population(0.25, nu)
    recs = simulate_continuous(0.25, nu, 50_000, 50, method_grid(["marginal", "kmeans"], ks, qs), population=pop)
    rows = {r["method"]: r for r in summarize(recs)}
    marg = [rows[f"marginal(q={q})"]["bias_mean"] for q in qs]
    km = [rows[f"kmeans(k={k})"]["bias_mean"] for k in ks]
    targets = [0.0260, 0.0119, 0.0028]
    close = all(abs(b - t) <= 0.003 for b, t in zip(marg, targets))
    km_ok = all(abs(b) <= 0.003 for b in km)
    check("8 continuous bias trends", close and km_ok,
          f"population {pop:.4f}; marginal {[round(b, 4) for b in marg]} vs {targets}; "
          f"kmeans k={ks}: {[round(b, 4) for b in km]}")


def test_c09_runtime_ordering_and_scaling():
    disc = bench_scaling("discrete", [500_000], method_grid(["marginal", "trapezium", "kmeans"], [1000], [1000]),
                         reps=3)
    t_m, t_t, t_k = (disc.medians[lab][0] for lab in ("marginal(q=1000)", "trapezium", "kmeans(k=1000)"))
    cont = bench_scaling("continuous", [50_000], method_grid(["kmeans", "marginal"], [100], [100]), reps=3,
                         nu=0.3583)
    c_k, c_m = cont.medians["kmeans(k=100)"][0], cont.medians["marginal(q=100)"][0]
    scale = bench_scaling("discrete", [500_000, 5_000_000], method_grid(["marginal"], q_list=[1000]), reps=3)
    ratio = scale.ratios("marginal(q=1000)")[0]
    discrete_ok = t_m < t_t < t_k
    continuous_ok = c_k < c_m
    scaling_ok = 5 <= ratio <= 15
    check("9 runtime ordering and scaling", discrete_ok and continuous_ok and scaling_ok,
          f"discrete n=500k marginal {t_m:.3f}s < trapezium {t_t:.3f}s < kmeans {t_k:.3f}s: {discrete_ok}; "
          f"continuous n=50k kmeans(k=100) {c_k:.3f}s < marginal(q=100) {c_m:.3f}s: {continuous_ok}; "
          f"marginal-discrete 10x ratio {ratio:.1f} in [5,15]: {scaling_ok}")


def test_c10_no_comparable_regions(tmp_path, capsys):
    rng = np.random.default_rng(1010)
    y = rng.standard_normal(1000)
    p = y + rng.standard_normal(1000)
    grid = percentile_boundaries(y, 100)
    nu = float(grid.boundaries[-1] - grid.boundaries[0]) + 0.01
    data = ContinuousDataset(y, p, nu)
    try:
        marginal_continuous(build_cell_counts(data, grid), grid, nu)
        raised = False
    except NoComparableRegions:
        raised = True
    path = tmp_path / "cont.csv"
    write_csv(ScoredPairs(y, p), path)
    code = cli_main(["compute", "--mode", "continuous", "--input", str(path), "--method", "marginal",
                     "--q", "100", "--nu", repr(nu)])
    err = capsys.readouterr().err
    ok = raised and code == 2 and "NoComparableRegions" in err
    check("10 NoComparableRegions failure mode", ok,
          f"library raised: {raised}, CLI exit {code}, stderr names error: {'NoComparableRegions' in err}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
