"""Exact travelling-wave solutions of w_xx - w_tt - a w_t = sin w + gamma.

All waves move with unit speed and depend on (x, t) only through
xi = (x - t)/a, so the PDE reduces to the profile ODE

    phi'(xi) = sin(phi) + gamma,        w(x, t) = phi(xi).

Closed-form profiles exist for every gamma; writing u = tan(w/2):

  gamma = 0      w = 2 arctan(e^{xi + k})                    (the kink)
  gamma = 1      w = 2 arctan(-(zb + 2)/zb),  zb = xi - k
  gamma^2 < 1    w = 2 arctan[(alpha/gamma)((1 + k e^{zb})/(1 - k e^{zb}) - 1/alpha)],
                 zb = alpha*xi, alpha = sqrt(1 - gamma^2)
  gamma^2 > 1    w = 2 arctan[(sigma*tan(zb + k) - 1)/gamma],
                 zb = (sigma/2)*xi, sigma = sqrt(gamma^2 - 1)

Each form is verified against the ODE by the residual operations below; the
test suite checks them at thousands of points per regime.
"""

import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import optimize


class Regime(enum.Enum):
    GAMMA_ZERO = "gamma_zero"
    GAMMA_ONE = "gamma_one"
    GAMMA_SUB = "gamma_sub"      # gamma^2 < 1, gamma != 0
    GAMMA_SUPER = "gamma_super"  # gamma^2 > 1


class SingularPointError(ValueError):
    """Raised when a wave is evaluated on its singular locus."""


class WaveDerivatives(NamedTuple):
    w_t: object
    w_x: object
    w_xx: object
    w_tt: object
    w_xxt: object


@dataclass(frozen=True)
class TravellingWave:
    """A closed-form travelling wave, tagged by its gamma regime.

    ``k_const`` is the integration constant of the profile ODE.  Waves with
    |gamma| = 1 exist only for gamma = +1 (the gamma = -1 case has no closed
    form in this catalog and is rejected).
    """

    regime: Regime
    gamma: float
    a: float
    k_const: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise ValueError(f"damping a must be > 0, got {self.a}")
        if not math.isfinite(self.gamma) or not math.isfinite(self.k_const):
            raise ValueError("gamma and k_const must be finite")
        g = self.gamma
        ok = {
            Regime.GAMMA_ZERO: g == 0.0,
            Regime.GAMMA_ONE: g == 1.0,
            Regime.GAMMA_SUB: 0.0 < g * g < 1.0,
            Regime.GAMMA_SUPER: g * g > 1.0,
        }[self.regime]
        if not ok:
            raise ValueError(f"regime {self.regime.value} inconsistent with gamma={g}")

    @classmethod
    def create(cls, gamma, a, k_const=0.0):
        """Pick the regime from gamma.  gamma = -1 is not in the catalog."""
        if gamma == 0.0:
            regime = Regime.GAMMA_ZERO
        elif gamma == 1.0:
            regime = Regime.GAMMA_ONE
        elif gamma * gamma < 1.0:
            regime = Regime.GAMMA_SUB
        elif gamma * gamma > 1.0:
            regime = Regime.GAMMA_SUPER
        else:
            raise ValueError("no closed-form wave for gamma = -1")
        return cls(regime, gamma, a, k_const)

    @property
    def alpha(self):
        if self.regime is not Regime.GAMMA_SUB:
            raise AttributeError("alpha is defined only for gamma^2 < 1")
        return math.sqrt(1.0 - self.gamma**2)

    @property
    def sigma(self):
        if self.regime is not Regime.GAMMA_SUPER:
            raise AttributeError("sigma is defined only for gamma^2 > 1")
        return math.sqrt(self.gamma**2 - 1.0)

    def xi_of(self, x, t):
        return (np.asarray(x, dtype=np.float64) - np.asarray(t, dtype=np.float64)) / self.a

    def singular_locus(self):
        """Human-readable description of where the profile blows up."""
        if self.regime is Regime.GAMMA_ZERO:
            return "none"
        if self.regime is Regime.GAMMA_ONE:
            return f"xi = {self.k_const} (zb = xi - k = 0)"
        if self.regime is Regime.GAMMA_SUB:
            if self.k_const > 0:
                return f"xi = {-math.log(self.k_const) / self.alpha} (k e^(alpha xi) = 1)"
            return "none (k <= 0)"
        lam = 0.5 * self.sigma
        return f"xi = (pi/2 + m*pi - {self.k_const})/{lam}, m integer (tangent poles)"


def parallelism_angle(psi):
    """The angle function 2*arctan(e^psi), taken into (0, pi) for all real psi.

    Satisfies sin(angle) = sech(psi) and angle(psi) + angle(-psi) = pi.
    Evaluated piecewise to avoid exp overflow.  In double precision the
    value saturates at the float representation of 0 or pi once
    |psi| > ~36.7 (which still lies strictly inside the open interval).
    """
    psi = np.asarray(psi, dtype=np.float64)
    small = 2.0 * np.arctan(np.exp(-np.abs(psi)))
    out = np.where(psi >= 0.0, np.pi - small, small)
    return out if out.ndim else float(out)


def _sech(z):
    z = np.abs(z)
    e = np.exp(-z)
    return 2.0 * e / (1.0 + e * e)


def _inner(wave, xi):
    """u = tan(w/2) and its first three xi-derivatives, as arrays.

    Returns (u, u1, u2, u3, bad) where ``bad`` flags singular points.
    """
    xi = np.asarray(xi, dtype=np.float64)
    g = wave.gamma
    k = wave.k_const
    # poles are detected inside a tight relative guard band: exact float
    # hits are measure-zero, and evaluations this close carry no precision
    guard = 1e-12
    if wave.regime is Regime.GAMMA_ZERO:
        u = np.exp(xi + k)
        return u, u, u, u, np.zeros(xi.shape, dtype=bool)
    if wave.regime is Regime.GAMMA_ONE:
        zb = xi - k
        bad = np.abs(zb) <= guard * (1.0 + np.abs(k))
        safe = np.where(bad, 1.0, zb)
        u = -1.0 - 2.0 / safe
        u1 = 2.0 / safe**2
        u2 = -4.0 / safe**3
        u3 = 12.0 / safe**4
        return u, u1, u2, u3, bad
    if wave.regime is Regime.GAMMA_SUB:
        al = wave.alpha
        E = k * np.exp(al * xi)
        bad = np.abs(1.0 - E) <= guard
        den = np.where(bad, 0.5, 1.0 - E)
        # A = (1+E)/(1-E); derivatives via E' = alpha E
        A = (1.0 + E) / den
        A1 = 2.0 * al * E / den**2
        A2 = 2.0 * al**2 * E / den**2 + 4.0 * al**2 * E**2 / den**3
        A3 = (2.0 * al**3 * E / den**2 + 12.0 * al**3 * E**2 / den**3
              + 12.0 * al**3 * E**3 / den**4)
        f = al / g
        return f * A - 1.0 / g, f * A1, f * A2, f * A3, bad
    # gamma^2 > 1
    sg = wave.sigma
    lam = 0.5 * sg
    zb = lam * xi + k
    cz = np.cos(zb)
    bad = np.abs(cz) <= guard
    T = np.tan(np.where(bad, 0.0, zb))
    T1 = lam * (1.0 + T * T)
    T2 = 2.0 * lam * T * T1
    T3 = 2.0 * lam * T1 * (lam + 3.0 * lam * T * T)
    f = sg / g
    return f * T - 1.0 / g, f * T1, f * T2, f * T3, bad


def _raise_if_singular(wave, bad):
    if np.any(bad):
        raise SingularPointError(
            f"wave evaluated on its singular locus: {wave.singular_locus()}"
        )


def wave_value(wave, x, t):
    """w(x, t) for the wave's regime; raises SingularPointError on poles."""
    xi = wave.xi_of(x, t)
    if wave.regime is Regime.GAMMA_ZERO:
        out = parallelism_angle(xi + wave.k_const)
        return out if np.ndim(out) else float(out)
    u, _, _, _, bad = _inner(wave, xi)
    _raise_if_singular(wave, bad)
    out = 2.0 * np.arctan(u)
    return out if out.ndim else float(out)


def _profile_derivs(wave, xi):
    """phi', phi'', phi''' by the chain rule through u = tan(w/2)."""
    xi = np.asarray(xi, dtype=np.float64)
    if wave.regime is Regime.GAMMA_ZERO:
        # phi = 2 arctan(e^z): sech-based forms are cheaper and overflow-safe
        z = xi + wave.k_const
        s = _sech(z)
        th = np.tanh(z)
        return s, -s * th, s * (1.0 - 2.0 * s * s)
    u, u1, u2, u3, bad = _inner(wave, xi)
    _raise_if_singular(wave, bad)
    D = 1.0 + u * u
    p1 = 2.0 * u1 / D
    p2 = 2.0 * u2 / D - 4.0 * u * u1**2 / D**2
    p3 = (2.0 * u3 / D - (12.0 * u * u1 * u2 + 4.0 * u1**3) / D**2
          + 16.0 * u**2 * u1**3 / D**3)
    return p1, p2, p3


def wave_derivatives(wave, x, t):
    """(w_t, w_x, w_xx, w_tt, w_xxt) from the analytic profile derivatives.

    With xi = (x - t)/a:  w_x = phi'/a = -w_t, w_xx = w_tt = phi''/a^2,
    w_xxt = -phi'''/a^3.
    """
    a = wave.a
    p1, p2, p3 = _profile_derivs(wave, wave.xi_of(x, t))
    return WaveDerivatives(-p1 / a, p1 / a, p2 / a**2, p2 / a**2, -p3 / a**3)


def reduced_residual(wave, x, t, mode="analytic", h=1e-4):
    """w_xx - w_tt - a*w_t - sin(w) - gamma at (x, t).

    Analytic mode uses the closed-form derivatives (vanishes to rounding for
    a true solution); finite-difference mode builds the derivatives from
    central stencils of wave_value and is O(h^2).
    """
    if mode == "analytic":
        w = wave_value(wave, x, t)
        d = wave_derivatives(wave, x, t)
        return d.w_xx - d.w_tt - wave.a * d.w_t - np.sin(w) - wave.gamma
    if mode != "finite-difference":
        raise ValueError(f"unknown mode {mode!r}")
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    w = wave_value(wave, x, t)
    w_xx = (wave_value(wave, x + h, t) - 2.0 * w + wave_value(wave, x - h, t)) / h**2
    w_tt = (wave_value(wave, x, t + h) - 2.0 * w + wave_value(wave, x, t - h)) / h**2
    w_t = (wave_value(wave, x, t + h) - wave_value(wave, x, t - h)) / (2.0 * h)
    return w_xx - w_tt - wave.a * w_t - np.sin(w) - wave.gamma


def profile_ode_residual(wave, xi):
    """phi'(xi) - sin(phi) - gamma, the 1-D reduction of reduced_residual."""
    xi = np.asarray(xi, dtype=np.float64)
    if wave.regime is Regime.GAMMA_ZERO:
        phi = parallelism_angle(xi + wave.k_const)
    else:
        u, _, _, _, bad = _inner(wave, xi)
        _raise_if_singular(wave, bad)
        phi = 2.0 * np.arctan(u)
    p1, _, _ = _profile_derivs(wave, xi)
    out = p1 - np.sin(phi) - wave.gamma
    return out if np.ndim(out) else float(out)


def kink_initial_data(a):
    """Initial data (f0, f1) of the kink 2*arctan(e^{(x-t)/a}) at t = 0."""
    if a <= 0.0:
        raise ValueError(f"damping a must be > 0, got {a}")

    def f0(x):
        return parallelism_angle(np.asarray(x, dtype=np.float64) / a)

    def f1(x):
        return -_sech(np.asarray(x, dtype=np.float64) / a) / a

    return f0, f1


def _kink_third_profile(xi):
    """|phi'''| of the kink: |sech(xi) * (1 - 2 sech^2(xi))|."""
    s = _sech(xi)
    return np.abs(s * (1.0 - 2.0 * s * s))


def w_xxt_bound(a):
    """Supremum of |w_xxt| for the kink; depends on a only as 1/a^3.

    Found by golden-section maximization of the even profile factor over
    xi >= 0 (the maximizer is xi = 0, value 1, giving bound 1/a^3).
    """
    if a <= 0.0:
        raise ValueError(f"damping a must be > 0, got {a}")
    res = optimize.minimize_scalar(lambda xi: -_kink_third_profile(xi),
                                   bounds=(0.0, 20.0), method="bounded",
                                   options={"xatol": 1e-12})
    best = max(-res.fun, float(_kink_third_profile(0.0)))
    return best / a**3


def wave_table(wave, grid):
    """Columns (x, t, w, w_t, w_xxt) on a grid; singular nodes become NaN.

    Returns (rows, n_singular): rows is an (nx*nt, 5) array in x-major order.
    """
    X, T = np.meshgrid(grid.x, grid.t, indexing="ij")
    rows = np.empty((X.size, 5))
    rows[:, 0] = X.ravel()
    rows[:, 1] = T.ravel()
    xi = wave.xi_of(X, T)
    u, u1, _, _, bad = _inner(wave, xi)
    n_singular = int(np.count_nonzero(bad))
    with np.errstate(all="ignore"):
        if wave.regime is Regime.GAMMA_ZERO:
            w = parallelism_angle(xi + wave.k_const)
        else:
            w = np.where(bad, np.nan, 2.0 * np.arctan(u))
        if n_singular:
            safe = TravellingWave(wave.regime, wave.gamma, wave.a, wave.k_const)
            xi_safe = np.where(bad, np.nan, xi)
            p1, _, p3 = _profile_derivs_nan(safe, xi_safe)
        else:
            p1, _, p3 = _profile_derivs(wave, xi)
    rows[:, 2] = np.ravel(w)
    rows[:, 3] = np.ravel(-p1 / wave.a)
    rows[:, 4] = np.ravel(-p3 / wave.a**3)
    return rows, n_singular


def _profile_derivs_nan(wave, xi):
    """Like _profile_derivs but NaN-tolerant (used for singular-row tables)."""
    if wave.regime is Regime.GAMMA_ZERO:
        return _profile_derivs(wave, xi)
    u, u1, u2, u3, _ = _inner(wave, np.where(np.isnan(xi), 0.0, xi))
    mask = np.isnan(xi)
    u = np.where(mask, np.nan, u)
    D = 1.0 + u * u
    p1 = 2.0 * u1 / D
    p2 = 2.0 * u2 / D - 4.0 * u * u1**2 / D**2
    p3 = (2.0 * u3 / D - (12.0 * u * u1 * u2 + 4.0 * u1**3) / D**2
          + 16.0 * u**2 * u1**3 / D**3)
    return p1, p2, p3
