import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import psglab as pg
from psglab.model import parse_config_text


class TestMediumParams:
    def test_derived_b(self):
        m = pg.MediumParams(0.01, 1.0, 1.0)
        assert m.b == pytest.approx(100.0)

    @pytest.mark.parametrize("bad", [
        {"epsilon": -1.0}, {"epsilon": 0.0}, {"a": -2.0}, {"c": 0.0},
        {"gamma": math.nan}, {"epsilon": math.inf},
    ])
    def test_invalid_rejected(self, bad):
        kw = {"epsilon": 1.0, "a": 1.0, "c": 1.0, "gamma": 0.0}
        kw.update(bad)
        with pytest.raises(ValueError):
            pg.MediumParams(**kw)

    def test_dissipative_boundary_case(self):
        # a*eps == c^2 counts as non-dissipative
        m = pg.MediumParams(1.0, 1.0, 1.0)
        assert not m.dissipative_regime

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-6, 1e3), st.floats(1e-6, 1e3), st.floats(1e-3, 1e3))
    def test_dissipative_predicate(self, eps, a, c):
        m = pg.MediumParams(eps, a, c)
        assert m.dissipative_regime == (a * eps < c * c)
        if abs(a * eps - c * c) > 1e-12 * c * c:   # b = c^2/eps rounds at ties
            assert m.dissipative_regime == (a < m.b)


class TestSpaceTimeGrid:
    def test_spacings(self):
        g = pg.SpaceTimeGrid(-1.0, 1.0, 5, 2.0, 5)
        assert g.dx == pytest.approx(0.5)
        assert g.dt == pytest.approx(0.5)
        assert g.x[0] == -1.0 and g.x[-1] == 1.0

    @pytest.mark.parametrize("kw", [
        {"x_min": 1.0, "x_max": -1.0}, {"nx": 1}, {"nt": 1}, {"t_max": 0.0},
    ])
    def test_invalid(self, kw):
        base = {"x_min": -1.0, "x_max": 1.0, "nx": 5, "t_max": 1.0, "nt": 5}
        base.update(kw)
        with pytest.raises(ValueError):
            pg.SpaceTimeGrid(**base)

    def test_refine(self):
        g = pg.SpaceTimeGrid(-1.0, 1.0, 5, 1.0, 3).refine(2, 3)
        assert (g.nx, g.nt) == (9, 7)


class TestGridFunction:
    def test_shape_checked(self):
        g = pg.SpaceTimeGrid(-1.0, 1.0, 4, 1.0, 3)
        with pytest.raises(ValueError):
            pg.GridFunction(grid=g, values=np.zeros((3, 4)))

    def test_finite_checked(self):
        g = pg.SpaceTimeGrid(-1.0, 1.0, 4, 1.0, 3)
        vals = np.zeros((4, 3))
        vals[1, 1] = np.nan
        with pytest.raises(ValueError):
            pg.GridFunction(grid=g, values=vals)


class TestSource:
    def test_zero_v_leaves_only_viscous_term(self, kink):
        m = pg.MediumParams(1e-2, 1.0, 1.0)
        for x, t in [(0.0, 0.0), (1.3, 0.4), (-2.0, 1.0)]:
            got = pg.source_superconductive(x, t, 0.0, kink, m)
            want = -m.epsilon * pg.wave_derivatives(kink, x, t).w_xxt
            assert got == pytest.approx(want, abs=1e-16)

    def test_vanishing_epsilon_limit(self, kink):
        m = pg.MediumParams(1e-300, 1.0, 1.0)
        assert pg.source_superconductive(0.3, 0.1, 0.0, kink, m) == pytest.approx(0.0, abs=1e-290)

    def test_reference_point_arithmetic(self, kink):
        # independent evaluation at (x, t, v) = (0, 0, 0.1), a = 1, eps = 1e-2:
        # w(0,0) = pi/2 and w_xxt(0,0) = -2 e^0 (1 - 6 + 1)/(1+1)^3 = 1, so
        # F = sin(0.1 + pi/2) - sin(pi/2) - 1e-2 = cos(0.1) - 1 - 0.01
        m = pg.MediumParams(1e-2, 1.0, 1.0)
        w_xxt0 = -2.0 * (1.0 - 6.0 + 1.0) / 8.0
        assert w_xxt0 == 1.0
        want = math.cos(0.1) - 1.0 - 1e-2 * w_xxt0
        got = pg.source_superconductive(0.0, 0.0, 0.1, kink, m)
        assert got == pytest.approx(want, abs=1e-15)
        assert got == pytest.approx(-0.014996, abs=5e-7)

    def test_difference_vanishes_at_zero_v(self, kink, rng):
        # F(v) - F(0) = sin(v+w) - sin(w) is exactly 0 at v = 0
        m = pg.MediumParams(1e-2, 1.0, 1.0)
        for _ in range(50):
            x, t = rng.uniform(-5, 5), rng.uniform(0, 2)
            f0 = pg.source_superconductive(x, t, 0.0, kink, m)
            assert f0 + m.epsilon * pg.wave_derivatives(kink, x, t).w_xxt == 0.0


class TestLipschitz:
    def test_superconductive_bound(self, kink, rng):
        m = pg.MediumParams(1e-2, 1.0, 1.0)
        samples = np.column_stack([
            rng.uniform(-10, 10, 10000), rng.uniform(0, 2, 10000),
            rng.uniform(-2, 2, 10000), rng.uniform(-2, 2, 10000)])
        ratio = pg.lipschitz_bound_check(kink, m, samples)
        assert 0.0 < ratio <= 1.0 + 1e-12

    def test_equal_v_pairs_skipped(self, kink, rng):
        m = pg.MediumParams(1e-2, 1.0, 1.0)
        samples = np.array([[0.0, 0.0, 0.5, 0.5], [0.0, 0.1, 0.2, 0.4]])
        ratio = pg.lipschitz_bound_check(kink, m, samples)
        assert ratio <= 1.0 + 1e-12

    def test_empty_rejected(self, kink):
        m = pg.MediumParams(1e-2, 1.0, 1.0)
        with pytest.raises(ValueError):
            pg.lipschitz_bound_check(kink, m, np.empty((0, 4)))
        with pytest.raises(ValueError):
            pg.lipschitz_bound_check(kink, m, np.array([[0.0, 0.0, 0.3, 0.3]]))


class TestConfigIO:
    def test_round_trip(self, tmp_path):
        p = pg.MediumParams(0.02, 1.5, 2.0, -0.25)
        g = pg.SpaceTimeGrid(-7.0, 9.0, 33, 1.25, 17)
        path = tmp_path / "run.cfg"
        pg.save_config(path, p, g)
        p2, g2 = pg.load_config(path)
        assert p2 == p and g2 == g

    def test_comments_and_spacing(self):
        cfg = parse_config_text("# hi\nepsilon = 0.5  # inline\n\na=2\n")
        assert cfg == {"epsilon": 0.5, "a": 2.0}

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown key"):
            parse_config_text("banana = 3\n")

    def test_duplicate_and_bad_value(self):
        with pytest.raises(ValueError, match="duplicate"):
            parse_config_text("a = 1\na = 2\n")
        with pytest.raises(ValueError, match="bad value"):
            parse_config_text("nx = four\n")

    def test_missing_keys_named(self, tmp_path):
        path = tmp_path / "partial.cfg"
        path.write_text("epsilon = 0.1\n")
        with pytest.raises(ValueError, match="missing keys"):
            pg.load_config(path)
