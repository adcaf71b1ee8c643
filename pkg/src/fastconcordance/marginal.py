"""Grid-based marginal approximations of the concordance probability.

Bands are left-closed and right-open: band ``b`` (0-based) is
``[tau_b, tau_{b+1}[`` with ``tau_0 = -inf`` and ``tau_{q+1} = +inf``, so a
grid with q boundaries has q+1 bands.

Binary outcome: since every A/B cross pair is formed, the joint
distribution of (pi_A, pi_B) over those pairs is the product of the two
marginals, and the grid mass of each region follows from the two empirical
CDFs at the boundaries. Pairs inside one cell are treated as ties.

Continuous outcome: points are counted on a (Y band, prediction band) grid and
each cell is compared with the cells to its right (higher Y band) whose lower
boundary clears the source cell's upper boundary by at least ``nu``.
"""
from __future__ import annotations

import numpy as np

from .core import (
    AllTied,
    CellCounts,
    ConcordanceEstimate,
    ContinuousDataset,
    EmptyInput,
    GridSpec,
    GroupedBinaryData,
    InputError,
    Method,
    NoComparableRegions,
    concordance_ratio,
    timed,
)


def _boundaries_from_sorted(v: np.ndarray, q: int) -> GridSpec:
    n = v.size
    m = np.arange(1, q + 1, dtype=np.int64)
    # nearest rank ceil(n*m/(q+1)) in integer arithmetic, 1-based
    rank = (n * m + q) // (q + 1)
    return GridSpec(np.unique(v[rank - 1]), requested_q=q)


def percentile_boundaries(values, q: int) -> GridSpec:
    """q evenly spaced empirical quantiles (levels m/(q+1)), nearest-rank definition.

    Equal quantiles are merged, so the grid can have fewer than q boundaries;
    ``GridSpec.requested_q`` keeps the original request.
    """
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise EmptyInput("cannot place boundaries on an empty sample")
    if int(q) < 1:
        raise InputError("q must be >= 1")
    return _boundaries_from_sorted(np.sort(v), int(q))


def _band_sizes(sorted_values: np.ndarray, tau: np.ndarray) -> np.ndarray:
    edges = np.searchsorted(sorted_values, tau, side="left")
    return np.diff(np.concatenate(([0], edges, [sorted_values.size])))


@timed
def marginal_discrete(data: GroupedBinaryData, grid: GridSpec | int, ties: str = "exclude") -> ConcordanceEstimate:
    """Marginal approximation for a binary outcome.

    ``grid`` is either a :class:`GridSpec` or a number of boundaries q, in
    which case the boundaries are percentiles of the pooled predictions.
    """
    a = np.sort(data.group_a)
    b = np.sort(data.group_b)
    if not isinstance(grid, GridSpec):
        q = int(grid)
        if q < 1:
            raise InputError("q must be >= 1")
        pooled = np.concatenate([a, b])
        pooled.sort()
        grid = _boundaries_from_sorted(pooled, q)
    tau = grid.boundaries
    na, nb = a.size, b.size
    cell_a = _band_sizes(a, tau).astype(np.int64)
    below_b = np.searchsorted(b, tau, side="left").astype(np.int64)  # B count < tau_i
    # A in band i with all of B in higher bands: B >= tau_i
    conc = int(np.dot(cell_a[:-1], nb - below_b))
    # A in band i with all of B in lower bands: B < tau_{i-1}
    disc = int(np.dot(cell_a[1:], below_b))
    same = na * nb - conc - disc
    if conc + disc == 0 and (ties == "exclude" or same == 0):
        raise AllTied("all cross pairs fall in the same grid cell")
    norm = na * nb
    return ConcordanceEstimate(
        c_hat=concordance_ratio(conc, disc, same, ties),
        concordant_mass=conc / norm,
        discordant_mass=disc / norm,
        tied_mass=same / norm,
        method=Method.MARGINAL,
        ties=ties,
        diagnostics={"q": grid.q, "requested_q": grid.requested_q, "concordant_pairs": conc,
                     "discordant_pairs": disc, "same_cell_pairs": same},
    )


def build_cell_counts(data: ContinuousDataset, grid: GridSpec, pi_grid: GridSpec | None = None) -> CellCounts:
    """Count observations per (Y band, prediction band) cell.

    The prediction dimension reuses ``grid`` unless ``pi_grid`` is given.
    """
    pi_grid = grid if pi_grid is None else pi_grid
    by = grid.band_index(data.response)
    bp = pi_grid.band_index(data.prediction)
    ncol = pi_grid.q + 1
    flat = np.bincount(by * ncol + bp, minlength=(grid.q + 1) * ncol)
    return CellCounts(flat.reshape(grid.q + 1, ncol))


def band_gate(grid: GridSpec, nu: float) -> np.ndarray:
    """``gate[i, k]``: Y band k lies to the right of band i by more than nu everywhere.

    Requires k >= i + 1 and tau_i + nu <= tau_{k-1} (upper edge of the source
    band plus nu below the lower edge of the target band).
    """
    tau = grid.boundaries
    nb = tau.size + 1
    upper = np.append(tau, np.inf)  # upper edge of band i
    lower = np.concatenate(([-np.inf], tau))  # lower edge of band k
    gate = (upper[:, None] + nu) <= lower[None, :]
    gate &= np.arange(nb)[None, :] >= np.arange(nb)[:, None] + 1
    return gate


def region_pair_masses(cells: CellCounts) -> dict[str, np.ndarray]:
    """Per (source Y band i, target Y band k) pair counts split by prediction order.

    ``conc[i, k]`` sums n_ij * n_kl over l > j, ``disc[i, k]`` over l < j and
    ``tie[i, k]`` over l == j.
    """
    n = cells.counts
    above = np.cumsum(n[:, ::-1], axis=1)[:, ::-1]  # sum over l >= j
    strictly_above = np.zeros_like(n)
    strictly_above[:, :-1] = above[:, 1:]
    strictly_below = np.cumsum(n, axis=1) - n
    # every partial sum is an integer <= total**2; below 2**53 float BLAS is exact
    exact_in_float = float(cells.total) ** 2 < 2.0**53
    f = n.astype(np.float64)

    def against(other):
        if exact_in_float:
            return np.rint(f @ other.astype(np.float64).T).astype(np.int64)
        return n @ other.T

    return {"conc": against(strictly_above), "disc": against(strictly_below), "tie": against(n)}


@timed
def marginal_continuous(cells: CellCounts, grid: GridSpec, nu: float, ties: str = "exclude",
                        direction: str = "right") -> ConcordanceEstimate:
    """Marginal approximation for a continuous outcome.

    ``direction="left"`` compares each cell with the cells to its left
    instead; every region pair is then visited from the other end and the
    totals are identical.
    """
    if nu < 0:
        raise InputError("nu must be >= 0")
    counts = cells.counts
    if counts.shape[0] != grid.q + 1:
        raise InputError(f"cell matrix has {counts.shape[0]} Y bands, grid implies {grid.q + 1}")
    gate = band_gate(grid, float(nu))
    masses = region_pair_masses(cells)
    if direction == "right":
        conc_ik = np.where(gate, masses["conc"], 0)
        disc_ik = np.where(gate, masses["disc"], 0)
        tie_ik = np.where(gate, masses["tie"], 0)
    elif direction == "left":
        # source i is the higher band; targets k < i with gate[k, i]; a target in a
        # lower prediction band is concordant
        gl = gate.T
        conc_ik = np.where(gl, masses["disc"], 0)
        disc_ik = np.where(gl, masses["conc"], 0)
        tie_ik = np.where(gl, masses["tie"], 0)
    else:
        raise ValueError("direction must be 'right' or 'left'")
    n_c = int(conc_ik.sum())
    n_d = int(disc_ik.sum())
    n_t = int(tie_ik.sum())
    if not gate.any() or n_c + n_d + n_t == 0:
        raise NoComparableRegions(f"no pair of regions is separated by more than nu={nu} in Y")
    if n_c + n_d == 0 and (ties == "exclude" or n_t == 0):
        raise AllTied("every nu-comparable region pair shares its prediction band")
    row = counts.sum(axis=1)
    upper_pairs = np.triu(np.outer(row, row), k=1)
    excluded = int(upper_pairs.sum()) - n_c - n_d - n_t
    return ConcordanceEstimate(
        c_hat=concordance_ratio(n_c, n_d, n_t, ties),
        concordant_mass=n_c,
        discordant_mass=n_d,
        tied_mass=n_t,
        method=Method.MARGINAL,
        ties=ties,
        diagnostics={
            "q": grid.q,
            "requested_q": grid.requested_q,
            "nu_excluded_pairs": excluded,
            "concordant_by_band_pair": conc_ik,
            "discordant_by_band_pair": disc_ik,
            # contributions from adjacent Y bands (k = i + 1); only reachable when nu == 0
            "adjacent_band_concordant": int(np.trace(conc_ik, offset=1)),
            "adjacent_band_discordant": int(np.trace(disc_ik, offset=1)),
        },
    )


@timed
def marginal_continuous_q(data: ContinuousDataset, q: int, ties: str = "exclude") -> ConcordanceEstimate:
    """Boundaries at q percentiles of the observed responses, then :func:`marginal_continuous`."""
    grid = percentile_boundaries(data.response, q)
    cells = build_cell_counts(data, grid)
    return marginal_continuous(cells, grid, data.nu, ties=ties)
