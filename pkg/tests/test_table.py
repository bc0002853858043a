import numpy as np
import pytest

import psglab as pg
from psglab.table import KernelTable, build_kernel_table, small_lag_count


@pytest.fixture(scope="module")
def tiny_grid():
    return pg.SpaceTimeGrid(-6.0, 6.0, 41, 0.6, 21)


@pytest.fixture(scope="module")
def tables(medium_small_eps, tiny_grid):
    nb = build_kernel_table(medium_small_eps, tiny_grid, use_numba=True)
    fallback = build_kernel_table(medium_small_eps, tiny_grid, use_numba=False)
    return nb, fallback


def test_paths_agree(tables):
    nb, fallback = tables
    scale = nb.values.max()
    assert np.max(np.abs(nb.values - fallback.values)) / scale < 1e-9


def test_small_lag_columns_skipped(tables, tiny_grid, medium_small_eps):
    nb, _ = tables
    L0 = small_lag_count(tiny_grid, medium_small_eps)
    assert nb.small_lags == L0 >= 1
    assert not nb.values[:, : L0 + 1].any()
    assert nb.values[:, L0 + 1 :].any()


def test_operator_columns_carry_the_exact_mass(tables, tiny_grid, medium_small_eps):
    # discrete column mass (cell-averaged kernel, unit weights) vs closed form
    nb, _ = tables
    dx = tiny_grid.dx
    a = medium_small_eps.a
    for l in (nb.small_lags + 2, tiny_grid.nt - 1):
        lag = l * tiny_grid.dt
        disc = dx * (2.0 * nb.values[:, l].sum() - nb.values[0, l])
        want = (1.0 - np.exp(-a * lag)) / a
        assert disc == pytest.approx(want, rel=2e-5)


def test_pointwise_mode_matches_k_time(medium_small_eps, tiny_grid):
    tab = build_kernel_table(medium_small_eps, tiny_grid, mode="pointwise")
    assert tab.small_lags == 0
    for d, l in [(0, 1), (3, 10), (10, 20), (1, 5)]:
        y = d * tiny_grid.dx
        lag = l * tiny_grid.dt
        assert tab.values[d, l] == pytest.approx(
            pg.k_time(y, lag, medium_small_eps), rel=1e-7, abs=1e-13)


def test_nonnegative_in_dissipative_regime(tables):
    nb, _ = tables
    assert nb.values.min() >= -1e-10


def test_offsets_and_lags(tables, tiny_grid):
    nb, _ = tables
    assert nb.offsets[1] == pytest.approx(tiny_grid.dx)
    assert nb.lags[-1] == pytest.approx(tiny_grid.t_max)


def test_validation():
    g = pg.SpaceTimeGrid(-1.0, 1.0, 5, 1.0, 4)
    m = pg.MediumParams(0.1, 1.0, 1.0)
    with pytest.raises(ValueError, match="shape"):
        KernelTable(grid=g, params=m, values=np.zeros((4, 4)))
    with pytest.raises(ValueError, match="mode"):
        KernelTable(grid=g, params=m, values=np.zeros((5, 4)), mode="banana")
