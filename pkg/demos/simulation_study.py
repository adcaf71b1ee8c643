"""
A small simulation study
========================

Repeat the binary-outcome experiment on fresh samples and summarise the bias
and run time of each method, in the same column layout as the ``fastconc
simulate`` command. Sizes are kept small so the script runs in seconds.
"""

import sys

from fastconcordance.bench import discrete_population, method_grid, simulate_discrete, summarize, write_summary_csv

mu, kappa = 0.10, 50
population = discrete_population(mu, kappa, n_pop=200_000, reps=2)
print(f"population C ~ {population:.4f}")

runs = method_grid(["trapezium", "kmeans", "marginal"], k_list=[20, 100], q_list=[10, 100, 1000])
records = simulate_discrete(mu, kappa, n=20_000, reps=10, runs=runs, seed=11, population=population)

###############################################################################
# One row per method and parameter: mean/median bias, spread of the
# estimates, and run-time statistics in seconds.
write_summary_csv(summarize(records), sys.stdout)
