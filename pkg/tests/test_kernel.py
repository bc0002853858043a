import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import psglab as pg
from psglab.kernel import QuadratureError, QuadratureSpec

import oracles

REGIMES = [
    pg.MediumParams(1.0, 1.0, 2.0),   # a < b  (1, 4)
    pg.MediumParams(1.0, 1.0, 1.0),   # a = b  (1, 1)
    pg.MediumParams(1.0, 4.0, 1.0),   # a > b  (4, 1)
]


class TestLaplaceDomain:
    def test_khat_at_origin_is_real_positive(self, medium_unit):
        for s in (0.5, 1.0, 7.0):
            v = pg.khat(0.0, s, medium_unit)
            want = 1.0 / (2.0 * math.sqrt(s * (s + 1.0) * (s + 4.0)))
            assert v.imag == 0.0
            assert v.real == pytest.approx(want, rel=1e-15)

    def test_khat_reference_value(self):
        # x = 1, s = 1, eps = a = c = 1: exp(-sqrt(2/2)) / (2 sqrt(1*2*2))
        m = pg.MediumParams(1.0, 1.0, 1.0)
        want = math.exp(-1.0) / 4.0
        assert pg.khat(1.0, 1.0, m).real == pytest.approx(want, rel=1e-15)

    def test_khat_even(self, medium_unit, rng):
        for _ in range(100):
            x = rng.uniform(-5, 5)
            s = complex(rng.uniform(0.1, 5), rng.uniform(-5, 5))
            assert pg.khat(x, s, medium_unit) == pg.khat(-x, s, medium_unit)

    def test_branch_points_rejected(self, medium_unit):
        for s in (0.0, -1.0, -4.0):
            with pytest.raises(ValueError, match="branch point"):
                pg.khat(1.0, s, medium_unit)
        with pytest.raises(ValueError, match="half-plane|exceed"):
            pg.khat(1.0, -10.0, medium_unit)

    def test_ghat_at_origin(self, medium_unit):
        s = 2.0
        want = 1.0 / (2.0 * math.sqrt(1.0) * math.sqrt((s + 1.0) * (s + 4.0)))
        assert pg.ghat(0.0, s, medium_unit).real == pytest.approx(want, rel=1e-15)

    def test_khat_ghat_consistency(self, medium_small_eps):
        kp = pg.KernelParams(medium=medium_small_eps)
        assert kp.hat_consistency_error(n=100, seed=3) < 1e-12

    def test_ghat_pole_approach(self, medium_unit):
        vals = [abs(pg.ghat(0.5, -1.0 + d, medium_unit)) for d in (0.5, 0.1, 0.01, 1e-4)]
        assert all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))
        assert vals[-1] > 1e1

    def test_r_of_scaling(self, medium_small_eps):
        kp = pg.KernelParams(medium=medium_small_eps)
        assert kp.r_of(0.0) == 0.0
        assert kp.r_of(-2.0) == kp.r_of(2.0) == pytest.approx(20.0)
        assert kp.b == pytest.approx(100.0)


class TestTimeDomainG:
    def test_origin_matches_closed_form_a_equals_b(self):
        # a = b: g(0, t) = e^{-at} I0(0) / (2 sqrt(eps))
        m = pg.MediumParams(1.0, 1.0, 1.0)
        for t in (0.1, 1.0, 5.0):
            assert pg.g_time(0.0, t, m) == pytest.approx(
                math.exp(-t) / 2.0, rel=1e-12)

    @pytest.mark.parametrize("m", REGIMES)
    @pytest.mark.parametrize("t", [0.1, 1.0, 5.0])
    def test_origin_matches_closed_form(self, m, t):
        assert pg.g_time(0.0, t, m) == pytest.approx(pg.g_origin(t, m), rel=1e-10)

    def test_against_inversion_oracle(self):
        # eps=1, a=1, c=2 (b=4), r=1, t=1; frozen from the Stehfest referee
        m = pg.MediumParams(1.0, 1.0, 2.0)
        frozen = 0.1165289791894
        got = pg.g_time(1.0, 1.0, m)
        assert got == pytest.approx(frozen, rel=1e-6)
        live = oracles.g_reference(1.0, 1.0, eps=1.0, a=1.0, c=2.0)
        assert got == pytest.approx(live, rel=1e-6)

    def test_nonnegative_in_dissipative_regime(self, medium_small_eps, rng):
        for _ in range(30):
            r = rng.uniform(0.0, 30.0)
            t = rng.uniform(0.05, 2.0)
            assert pg.g_time(r, t, medium_small_eps) >= 0.0

    def test_invalid_arguments(self, medium_unit):
        with pytest.raises(ValueError):
            pg.g_time(0.0, -1.0, medium_unit)
        with pytest.raises(ValueError):
            pg.g_time(-1.0, 1.0, medium_unit)


class TestTimeDomainK:
    @pytest.mark.parametrize("m", REGIMES + [pg.MediumParams(1e-2, 1.0, 1.0)])
    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
    def test_origin_matches_half_order_convolution(self, m, t):
        assert pg.k_time(0.0, t, m) == pytest.approx(pg.k_origin(t, m), rel=1e-8)

    def test_even_in_x(self, medium_small_eps, rng):
        for _ in range(20):
            x = rng.uniform(0.1, 3.0)
            t = rng.uniform(0.2, 2.0)
            assert pg.k_time(x, t, medium_small_eps) == pg.k_time(-x, t, medium_small_eps)

    def test_against_inversion_oracle(self):
        m = pg.MediumParams(1.0, 1.0, 2.0)
        frozen = 0.1365779123503
        got = pg.k_time(1.0, 1.0, m)
        assert got == pytest.approx(frozen, rel=1e-6)
        live = oracles.k_reference(1.0, 1.0, eps=1.0, a=1.0, c=2.0)
        assert got == pytest.approx(live, rel=1e-6)

    def test_small_time_decay(self):
        # far outside the parabolic reach: essentially zero at t = 1e-6
        m = pg.MediumParams(1e-2, 1.0, 1.0)
        assert pg.k_time(1.0, 1e-6, m) < 1e-3

    def test_a_bigger_than_b_regime(self):
        # exercises the J0 branch end to end
        m = pg.MediumParams(1.0, 4.0, 1.0)
        got = pg.k_time(1.0, 1.0, m)
        live = oracles.k_reference(1.0, 1.0, eps=1.0, a=4.0, c=1.0)
        assert got == pytest.approx(live, rel=1e-6)


class TestLaplacePair:
    @pytest.mark.parametrize("m", REGIMES)
    def test_pair_identity(self, m):
        err = max(pg.verify_laplace_pair(r, (0.5, 1.0, 5.0), m) for r in (0.0, 0.5, 2.0))
        assert err < 1e-6

    def test_large_s_both_sides_small(self, medium_unit):
        s = 50.0
        err = pg.verify_laplace_pair(1.0, (s,), medium_unit)
        assert err < 1e-6
        assert abs(pg.ghat(1.0, s, medium_unit)) < 1e-3

    def test_s_near_boundary_rejected(self, medium_unit):
        with pytest.raises(ValueError, match="convergence boundary"):
            pg.verify_laplace_pair(0.5, (-0.95,), medium_unit)


class TestKernelMass:
    def test_closed_form_saturation(self, medium_unit):
        # (1/a)(1 - e^{-at}) at t = 20/a sits within 1e-8 of 1/a
        a = medium_unit.a
        assert abs(pg.kernel_mass_exact(20.0 / a, medium_unit) - 1.0 / a) < 1e-8

    def test_reference_value(self, medium_unit):
        assert pg.kernel_mass_exact(1.0, medium_unit) == pytest.approx(
            1.0 - math.exp(-1.0), rel=1e-15)

    def test_numerical_mass(self, medium_small_eps):
        for t in (0.5, 1.0):
            got = pg.kernel_mass(t, medium_small_eps)
            want = pg.kernel_mass_exact(t, medium_small_eps)
            assert got == pytest.approx(want, rel=1e-5)
            assert got <= 1.0 / medium_small_eps.a + 1e-10

    def test_laplace_side_identity(self):
        # 2 int khat dy = 1/(s^2 + a s);  s = 2, a = 1 -> 1/6
        m = pg.MediumParams(1.0, 1.0, 1.0)
        assert pg.kernel_mass_hat(2.0, m) == pytest.approx(1.0 / 6.0, rel=1e-9)
        m2 = pg.MediumParams(0.05, 0.7, 1.3)
        s = 1.7
        assert pg.kernel_mass_hat(s, m2) == pytest.approx(
            1.0 / (s * s + m2.a * s), rel=1e-9)


class TestPdeResidual:
    def test_second_order_richardson(self):
        m = pg.MediumParams(0.1, 1.0, 1.0)
        r1 = pg.pde_residual(1.0, 1.0, m, 2e-2)
        r2 = pg.pde_residual(1.0, 1.0, m, 1e-2)
        assert 3.5 <= abs(r1 / r2) <= 4.5

    def test_far_field_residual_vanishes(self):
        # kernel is ~0 at x = 30 for t <= 1; the zero function solves the PDE
        m = pg.MediumParams(0.1, 1.0, 1.0)
        assert abs(pg.pde_residual(30.0, 1.0, m, 2e-2)) < 1e-8

    def test_preconditions(self, medium_unit):
        with pytest.raises(ValueError, match="source line"):
            pg.pde_residual(0.0, 1.0, medium_unit, 1e-2)
        with pytest.raises(ValueError, match="t > 2h"):
            pg.pde_residual(1.0, 0.01, medium_unit, 1e-2)


class TestQuadratureSpec:
    def test_defaults(self):
        q = QuadratureSpec()
        assert q.abs_tol == 1e-12 and q.rel_tol == 1e-10

    def test_validation(self):
        with pytest.raises(ValueError):
            QuadratureSpec(abs_tol=-1.0)
        with pytest.raises(ValueError):
            QuadratureSpec(max_subdivisions=0)

    def test_error_carries_achieved_estimate(self):
        err = QuadratureError("nope", 1.25, 3e-4)
        assert err.value == 1.25
        assert err.achieved == 3e-4
        assert "3.00e-04" in str(err)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 3.0), st.floats(0.1, 2.0))
def test_k_nonnegative_dissipative(x, t):
    m = pg.MediumParams(1e-2, 1.0, 1.0)
    assert pg.k_time(x, t, m) >= -1e-10
