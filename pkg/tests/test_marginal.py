import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fastconcordance.core import (
    AllTied,
    ContinuousDataset,
    GridSpec,
    GroupedBinaryData,
    InputError,
    NoComparableRegions,
)
from fastconcordance.exact import exact_continuous, exact_discrete_rank
from fastconcordance.marginal import (
    band_gate,
    build_cell_counts,
    marginal_continuous,
    marginal_continuous_q,
    marginal_discrete,
    percentile_boundaries,
)


def band_of(v, tau):
    # band b holds tau[b-1] <= v < tau[b]
    return sum(v >= t for t in tau)


def loop_discrete_bands(a, b, tau):
    c = d = s = 0
    for x, z in itertools.product(b, a):
        bx, bz = band_of(x, tau), band_of(z, tau)
        c += bx > bz
        d += bx < bz
        s += bx == bz
    return c, d, s


def loop_continuous_bands(y, p, tau, nu):
    lower = [-np.inf] + list(tau)
    upper = list(tau) + [np.inf]
    c = d = t = 0
    for i, j in itertools.permutations(range(len(y)), 2):
        bi, bk = band_of(y[i], tau), band_of(y[j], tau)
        if bk >= bi + 1 and upper[bi] + nu <= lower[bk]:
            pi, pk = band_of(p[i], tau), band_of(p[j], tau)
            c += pk > pi
            d += pk < pi
            t += pk == pi
    return c, d, t


def test_percentile_boundaries_nearest_rank():
    g = percentile_boundaries(np.arange(1.0, 10.0), 2)
    # levels 1/3 and 2/3 of 9 values: ranks 3 and 6
    assert g.boundaries.tolist() == [3.0, 6.0]
    g = percentile_boundaries([1.0] * 5 + [2.0] * 5, 4)  # ranks 2, 4, 6, 8
    assert g.boundaries.tolist() == [1.0, 2.0] and g.requested_q == 4
    with pytest.raises(InputError):
        percentile_boundaries([1.0], 0)


small = st.lists(st.integers(0, 9).map(lambda v: v / 3), min_size=1, max_size=20)


@given(small, small, st.integers(1, 6))
def test_discrete_matches_band_oracle(a, b, q):
    data = GroupedBinaryData(a, b)
    tau = percentile_boundaries(np.concatenate([a, b]), q).boundaries
    c, d, s = loop_discrete_bands(a, b, tau.tolist())
    if c + d == 0:
        with pytest.raises(AllTied):
            marginal_discrete(data, q)
        return
    est = marginal_discrete(data, q)
    assert est.diagnostics["concordant_pairs"] == c
    assert est.diagnostics["discordant_pairs"] == d
    assert est.diagnostics["same_cell_pairs"] == s


def test_discrete_all_distinct_boundaries_is_exact(rng):
    data = GroupedBinaryData(rng.integers(0, 30, 200) / 7, rng.integers(10, 40, 100) / 7)
    grid = GridSpec(np.unique(np.concatenate([data.group_a, data.group_b])))
    assert marginal_discrete(data, grid).c_hat == exact_discrete_rank(data).c_hat
    assert marginal_discrete(data, grid, "half").c_hat == exact_discrete_rank(data, "half").c_hat


rows = st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=2, max_size=18)


@given(rows, st.integers(1, 5), st.sampled_from([0.0, 0.5, 1.0, 2.5]))
def test_continuous_matches_cell_oracle(r, q, nu):
    y = [float(a) for a, _ in r]
    p = [float(b) for _, b in r]
    data = ContinuousDataset(y, p, nu)
    grid = percentile_boundaries(y, q)
    cells = build_cell_counts(data, grid)
    assert cells.total == len(y)
    c, d, t = loop_continuous_bands(y, p, grid.boundaries.tolist(), nu)
    if c + d + t == 0:
        with pytest.raises(NoComparableRegions):
            marginal_continuous(cells, grid, nu)
        return
    if c + d == 0:
        with pytest.raises(AllTied):
            marginal_continuous(cells, grid, nu)
        return
    right = marginal_continuous(cells, grid, nu)
    left = marginal_continuous(cells, grid, nu, direction="left")
    assert (right.concordant_mass, right.discordant_mass, right.tied_mass) == (c, d, t)
    assert (left.concordant_mass, left.discordant_mass, left.tied_mass) == (c, d, t)


def test_each_band_pair_counted_once(rng):
    y = rng.standard_normal(500)
    data = ContinuousDataset(y, y + rng.standard_normal(500))
    grid = percentile_boundaries(y, 20)
    est = marginal_continuous(build_cell_counts(data, grid), grid, 0.0)
    conc = est.diagnostics["concordant_by_band_pair"]
    assert np.all(np.tril(conc) == 0)
    assert est.diagnostics["adjacent_band_concordant"] == int(np.trace(conc, offset=1))


def test_gate_excludes_adjacent_bands_when_nu_positive():
    grid = GridSpec([0.0, 1.0, 2.0])
    gate = band_gate(grid, 0.5)
    assert not np.any(np.diagonal(gate, offset=1))
    assert gate[0, 2] and gate[1, 3] and not gate[1, 2]
    assert np.array_equal(band_gate(grid, 0.0), np.triu(np.ones((4, 4), bool), k=1))


def test_continuous_fine_grid_close_to_exact(rng):
    y = rng.standard_normal(2000)
    data = ContinuousDataset(y, 0.5 * y + rng.standard_normal(2000), nu=0.0)
    est = marginal_continuous_q(data, 500)
    assert abs(est.c_hat - exact_continuous(data).c_hat) < 0.005
    assert est.elapsed > 0


def test_huge_nu_has_no_regions(rng):
    y = rng.standard_normal(200)
    data = ContinuousDataset(y, y, nu=100.0)
    with pytest.raises(NoComparableRegions):
        marginal_continuous_q(data, 100)


def test_cell_matrix_shape_checked():
    grid = GridSpec([0.0])
    data = ContinuousDataset([1.0, -1.0], [1.0, -1.0])
    cells = build_cell_counts(data, GridSpec([0.0, 1.0]))
    with pytest.raises(InputError):
        marginal_continuous(cells, grid, 0.0)
