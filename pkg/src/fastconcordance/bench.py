"""Simulation sweeps, summaries and runtime benchmarks behind the CLI."""
from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .clustering import KMeansConfig
from .core import ContinuousDataset, GroupedBinaryData, InputError, split_binary
from .exact import exact_continuous, exact_continuous_sweep, exact_discrete_brute, exact_discrete_rank
from .kmeans_estimator import kmeans_continuous, kmeans_discrete
from .marginal import marginal_continuous_q, marginal_discrete
from .simulation import (
    BetaBinConfig,
    GaussianPairConfig,
    calibrate_nu,
    population_c_continuous,
    population_c_discrete,
    rep_rng,
    sample_beta_binomial,
    sample_gaussian_pairs,
)
from .trapezium import trapezium_auc

METHODS = ("exact", "rank", "trapezium", "kmeans", "marginal")


@dataclass
class RunRecord:
    method: str
    params: dict
    c_hat: float
    concordant_mass: float
    discordant_mass: float
    elapsed: float
    n: int
    bias: float | None = None
    rep: int | None = None

    def to_json(self) -> dict:
        out = {
            "method": self.method,
            "params": dict(self.params),
            "c_hat": self.c_hat,
            "concordant_mass": self.concordant_mass,
            "discordant_mass": self.discordant_mass,
            "elapsed_ms": self.elapsed * 1e3,
            "n": self.n,
        }
        if self.bias is not None:
            out["bias"] = self.bias
        if self.rep is not None:
            out["rep"] = self.rep
        return out


def estimate(method: str, data, *, k: int | None = None, q: int | None = None, seed: int = 0,
             ties: str = "exclude", kmeans_config: KMeansConfig | None = None):
    """Dispatch a method name onto the estimator for ``data``'s setting.

    ``data`` is a :class:`GroupedBinaryData` (binary outcome) or a
    :class:`ContinuousDataset`. For continuous data ``exact`` is the O(n^2)
    scan and ``rank`` the O(n log n) sweep.
    """
    binary = isinstance(data, GroupedBinaryData)
    if method == "exact":
        return exact_discrete_brute(data, ties) if binary else exact_continuous(data, ties)
    if method == "rank":
        return exact_discrete_rank(data, ties) if binary else exact_continuous_sweep(data, ties)
    if method == "trapezium":
        if not binary:
            raise InputError("the trapezium rule applies to binary outcomes only")
        return trapezium_auc(data)
    if method == "kmeans":
        if kmeans_config is None:
            if k is None:
                raise InputError("kmeans needs k")
            kmeans_config = KMeansConfig(k=k, seed=seed)
        return kmeans_discrete(data, kmeans_config, ties) if binary else kmeans_continuous(data, kmeans_config, ties)
    if method == "marginal":
        if q is None:
            raise InputError("marginal needs q")
        return marginal_discrete(data, q, ties) if binary else marginal_continuous_q(data, q, ties)
    raise InputError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def record(method: str, data, n: int, reference: float | None = None, rep: int | None = None,
           **params) -> RunRecord:
    est = estimate(method, data, **params)
    shown = {key: v for key, v in params.items() if v is not None and key != "kmeans_config"}
    if isinstance(data, ContinuousDataset):
        shown["nu"] = data.nu
    return RunRecord(
        method=method,
        params=shown,
        c_hat=float(est.c_hat),
        concordant_mass=float(est.concordant_mass),
        discordant_mass=float(est.discordant_mass),
        elapsed=est.elapsed,
        n=n,
        bias=None if reference is None else float(est.c_hat) - reference,
        rep=rep,
    )


# --- method grids ------------------------------------------------------------


def method_grid(methods, k_list=(), q_list=()) -> list[tuple[str, dict]]:
    """Expand method names into (method, params) runs; k/q lists fan out."""
    runs = []
    for m in methods:
        if m == "kmeans":
            runs += [("kmeans", {"k": int(k)}) for k in k_list]
        elif m == "marginal":
            runs += [("marginal", {"q": int(q)}) for q in q_list]
        elif m in METHODS:
            runs.append((m, {}))
        else:
            raise InputError(f"unknown method {m!r}")
    return runs


def _label(method: str, params: dict) -> str:
    if "k" in params:
        return f"{method}(k={params['k']})"
    if "q" in params:
        return f"{method}(q={params['q']})"
    return method


# --- population cache --------------------------------------------------------


class PopulationCache:
    """JSON file mapping a scenario key to its Monte-Carlo population value."""

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else None
        self._data = {}
        if self.path is not None and self.path.exists():
            self._data = json.loads(self.path.read_text())

    def get_or_compute(self, key: str, compute):
        if key in self._data:
            return self._data[key]
        value = float(compute())
        self._data[key] = value
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            tmp = self.path.with_suffix(".tmp")
            tmp.write_text(json.dumps(self._data, indent=1, sort_keys=True))
            os.replace(tmp, self.path)
        return value


def discrete_population(mu, kappa, n_pop=1_000_000, reps=5, seed=0, cache: PopulationCache | None = None):
    key = f"discrete:mu={mu}:kappa={kappa}:n={n_pop}:reps={reps}:seed={seed}"
    fn = lambda: population_c_discrete(BetaBinConfig(mu, kappa, seed=seed), n_pop, reps)  # noqa: E731
    return (cache or PopulationCache()).get_or_compute(key, fn)


def continuous_population(rho, nu, n_pop=50_000, reps=10, seed=0, cache: PopulationCache | None = None):
    key = f"continuous:rho={rho}:nu={nu}:n={n_pop}:reps={reps}:seed={seed}"
    fn = lambda: population_c_continuous(rho, nu, n_pop, reps, seed)  # noqa: E731
    return (cache or PopulationCache()).get_or_compute(key, fn)


def nu_from_percent(x_percent: float, inner_n=10_000, inner_reps=10, outer_reps=10, seed=0,
                    cache: PopulationCache | None = None) -> float:
    key = f"nu:x={x_percent}:inner_n={inner_n}:inner={inner_reps}:outer={outer_reps}:seed={seed}"
    fn = lambda: calibrate_nu([x_percent], inner_n, inner_reps, outer_reps, seed)[0]  # noqa: E731
    return (cache or PopulationCache()).get_or_compute(key, fn)


# --- simulation sweeps -------------------------------------------------------


def _discrete_rep(args):
    mu, kappa, n, runs, seed, population, ties, r = args
    data = split_binary(sample_beta_binomial(BetaBinConfig(mu, kappa, seed=seed), n, rep_rng(seed, r)))
    return [record(m, data, n, population, rep=r, seed=_run_seed(seed, r), ties=ties, **p) for m, p in runs]


def _continuous_rep(args):
    rho, nu, n, runs, seed, population, ties, r = args
    pairs = sample_gaussian_pairs(GaussianPairConfig(rho, n, seed), rep_rng(seed, r))
    data = ContinuousDataset(pairs.response, pairs.prediction, nu)
    return [record(m, data, n, population, rep=r, seed=_run_seed(seed, r), ties=ties, **p) for m, p in runs]


def _run_reps(fn, head, reps, workers):
    jobs = [(*head, r) for r in range(reps)]
    if workers <= 1:
        chunks = map(fn, jobs)
    else:
        # timings from parallel workers share the machine; use workers=1 for run-time columns
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(fn, jobs))
    return [rec for chunk in chunks for rec in chunk]


def simulate_discrete(mu, kappa, n, reps, runs, seed=0, population=None, ties="exclude", workers=1):
    """Per-repetition records for every run on fresh beta-binomial samples.

    Repetition r always draws from the stream (seed, r), so the records do not
    depend on ``workers``.
    """
    BetaBinConfig(mu, kappa, seed=seed)  # validate before spawning anything
    return _run_reps(_discrete_rep, (mu, kappa, n, runs, seed, population, ties), reps, workers)


def simulate_continuous(rho, nu, n, reps, runs, seed=0, population=None, ties="exclude", workers=1):
    GaussianPairConfig(rho, n, seed)
    if nu < 0:
        raise ValueError("nu must be >= 0")
    return _run_reps(_continuous_rep, (rho, nu, n, runs, seed, population, ties), reps, workers)


def _run_seed(seed: int, rep: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(rep), 1]).generate_state(1)[0])


def _iqr(x) -> float:
    q75, q25 = np.percentile(x, [75, 25])
    return float(q75 - q25)


SUMMARY_COLUMNS = (
    "method", "n", "reps", "bias_mean", "bias_median", "c_mean", "c_sigma", "c_iqr",
    "time_mean", "time_median", "time_sigma", "time_iqr",
)


def summarize(records: list[RunRecord]) -> list[dict]:
    """One row per (method, parameters): bias and run-time columns of the study tables.

    With no population value attached the bias columns are ``None``.
    """
    groups: dict[str, list[RunRecord]] = {}
    for rec in records:
        key = _label(rec.method, rec.params)
        groups.setdefault(key, []).append(rec)
    rows = []
    for key, recs in groups.items():
        c = np.array([r.c_hat for r in recs])
        t = np.array([r.elapsed for r in recs])
        biases = [r.bias for r in recs]
        has_bias = all(b is not None for b in biases)
        b = np.array(biases, dtype=float) if has_bias else None
        rows.append({
            "method": key,
            "n": recs[0].n,
            "reps": len(recs),
            "bias_mean": float(b.mean()) if has_bias else None,
            "bias_median": float(np.median(b)) if has_bias else None,
            "c_mean": float(c.mean()),
            "c_sigma": float(c.std(ddof=1)) if c.size > 1 else 0.0,
            "c_iqr": _iqr(c),
            "time_mean": float(t.mean()),
            "time_median": float(np.median(t)),
            "time_sigma": float(t.std(ddof=1)) if t.size > 1 else 0.0,
            "time_iqr": _iqr(t),
        })
    return rows


RECORD_COLUMNS = ("rep", "method", "k", "q", "nu", "seed", "n", "c_hat", "concordant_mass",
                  "discordant_mass", "bias", "elapsed")


def write_records_csv(records: list[RunRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=RECORD_COLUMNS)
        w.writeheader()
        for r in records:
            w.writerow({
                "rep": r.rep, "method": r.method, "k": r.params.get("k", ""), "q": r.params.get("q", ""),
                "nu": r.params.get("nu", ""), "seed": r.params.get("seed", ""), "n": r.n,
                "c_hat": repr(r.c_hat), "concordant_mass": repr(r.concordant_mass),
                "discordant_mass": repr(r.discordant_mass),
                "bias": "" if r.bias is None else repr(r.bias), "elapsed": repr(r.elapsed),
            })


def read_records_csv(path) -> list[RunRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            params = {}
            for key, cast in (("k", int), ("q", int), ("nu", float), ("seed", int)):
                if row[key] != "":
                    params[key] = cast(row[key])
            out.append(RunRecord(
                method=row["method"], params=params, c_hat=float(row["c_hat"]),
                concordant_mass=float(row["concordant_mass"]), discordant_mass=float(row["discordant_mass"]),
                elapsed=float(row["elapsed"]), n=int(row["n"]),
                bias=None if row["bias"] == "" else float(row["bias"]),
                rep=None if row["rep"] == "" else int(row["rep"]),
            ))
    return out


def write_summary_csv(rows: list[dict], path_or_file) -> None:
    own = isinstance(path_or_file, (str, os.PathLike))
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow({key: ("" if row[key] is None else row[key]) for key in SUMMARY_COLUMNS})
    finally:
        if own:
            fh.close()


# --- runtime scaling ---------------------------------------------------------


@dataclass
class ScalingReport:
    """Median wall time per (run label, size) and the ratio between consecutive sizes."""

    sizes: list[int]
    medians: dict[str, list[float]] = field(default_factory=dict)

    def ratios(self, label: str) -> list[float]:
        m = self.medians[label]
        return [m[i + 1] / m[i] for i in range(len(m) - 1)]

    def to_json(self) -> dict:
        return {
            "sizes": self.sizes,
            "median_seconds": self.medians,
            "scaling_ratios": {lab: self.ratios(lab) for lab in self.medians},
        }


def make_dataset(mode: str, n: int, rng, mu=0.10, kappa=50.0, rho=0.25, nu=0.0):
    if mode == "discrete":
        return split_binary(sample_beta_binomial(BetaBinConfig(mu, kappa), n, rng))
    pairs = sample_gaussian_pairs(GaussianPairConfig(rho, n), rng)
    return ContinuousDataset(pairs.response, pairs.prediction, nu)


def bench_scaling(mode: str, sizes, runs, reps: int = 3, seed: int = 0, **scenario) -> ScalingReport:
    """Time each run on ``reps`` fresh datasets per size; the data generation is not timed."""
    report = ScalingReport(sizes=[int(s) for s in sizes])
    for method, params in runs:
        report.medians[_label(method, params)] = []
    for si, size in enumerate(report.sizes):
        times: dict[str, list[float]] = {lab: [] for lab in report.medians}
        for r in range(reps):
            data = make_dataset(mode, size, rep_rng(seed, si, r), **scenario)
            for method, params in runs:
                t0 = time.perf_counter()
                estimate(method, data, seed=_run_seed(seed, r), **params)
                times[_label(method, params)].append(time.perf_counter() - t0)
        for lab, ts in times.items():
            report.medians[lab].append(float(np.median(ts)))
    return report

