import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special as sp

from psglab.specfun import (BesselEval, _i0_series, _i0e_asymptotic,
                            bessel_i0, bessel_i0_scaled, bessel_i0_scaled_arr,
                            bessel_j0, bessel_j0_arr)


def test_i0_at_zero():
    assert bessel_i0(0.0) == 1.0


def test_i0_series_value_against_mpmath():
    # I0(1), 30-digit reference
    ref = 1.26606587775200833559824462521
    assert abs(bessel_i0(1.0) - ref) < 1e-14 * ref
    assert float(mp.besseli(0, 1)) == pytest.approx(ref, rel=1e-15)


def test_i0_scaled_consistency():
    # two code paths: i0(10) vs e^10 * i0e(10)
    lhs = bessel_i0(10.0)
    rhs = math.exp(10.0) * bessel_i0_scaled(10.0)
    assert abs(lhs - rhs) < 1e-12 * lhs


def test_i0e_at_zero_and_evenness():
    assert bessel_i0_scaled(0.0) == 1.0
    assert bessel_i0_scaled(-5.0) == bessel_i0_scaled(5.0)


def test_i0e_large_argument_asymptote():
    # leading asymptote 1/sqrt(2 pi z) at z = 100
    lead = 1.0 / math.sqrt(2.0 * math.pi * 100.0)
    assert abs(bessel_i0_scaled(100.0) - lead) / lead < 1e-2


@pytest.mark.parametrize("z", np.linspace(10.0, 20.0, 21))
def test_i0_branch_overlap(z):
    series = math.exp(-z) * _i0_series(z)
    asym = _i0e_asymptotic(z)
    assert abs(series - asym) / series < 1e-10


def test_i0_against_scipy_dense():
    z = np.linspace(0.0, 300.0, 1501)
    mine = np.array([bessel_i0_scaled(v) for v in z])
    ref = sp.i0e(z)
    assert np.max(np.abs(mine - ref) / ref) < 1e-12


def test_j0_at_zero_and_first_zero():
    assert bessel_j0(0.0) == 1.0
    assert abs(bessel_j0(2.404825557695773)) < 1e-9


def test_j0_against_scipy_dense():
    z = np.linspace(0.0, 100.0, 2001)
    mine = np.array([bessel_j0(v) for v in z])
    ref = sp.j0(z)
    # worst absolute error sits just below the series/asymptotic crossover;
    # comfortably inside the 1e-10 relative contract
    assert np.max(np.abs(mine - ref)) < 5e-12
    big = np.abs(ref) > 1e-2
    assert np.max(np.abs(mine[big] - ref[big]) / np.abs(ref[big])) < 1e-10


def test_j0_bounded_below_i0(rng):
    # |J0(z)| <= 1 <= I0(z) on the real line
    z = rng.uniform(-60.0, 60.0, size=1000)
    for v in z:
        assert abs(bessel_j0(v)) <= 1.0 + 1e-15
        assert bessel_i0(min(abs(v), 50.0)) >= 1.0


def test_array_variants_match_scalars(rng):
    z = rng.uniform(-80.0, 80.0, size=500)
    i0e_arr = bessel_i0_scaled_arr(z)
    j0_arr = bessel_j0_arr(z)
    for i, v in enumerate(z):
        assert i0e_arr[i] == pytest.approx(bessel_i0_scaled(v), rel=1e-14, abs=1e-300)
        assert j0_arr[i] == pytest.approx(bessel_j0(v), rel=1e-12, abs=1e-13)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-600.0, max_value=600.0))
def test_i0e_range_and_evenness(z):
    v = bessel_i0_scaled(z)
    assert 0.0 < v <= 1.0
    assert v == bessel_i0_scaled(-z)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.0, max_value=500.0), st.floats(min_value=0.0, max_value=10.0))
def test_i0e_monotone_decreasing(z, dz):
    assert bessel_i0_scaled(z + dz) <= bessel_i0_scaled(z) + 1e-15


def test_bessel_eval_invariants():
    BesselEval(1.5, scaled=False)
    BesselEval(0.3, scaled=True)
    with pytest.raises(ValueError):
        BesselEval(0.5, scaled=False)
    with pytest.raises(ValueError):
        BesselEval(1.5, scaled=True)
