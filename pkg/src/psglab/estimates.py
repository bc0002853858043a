"""Boundary-layer estimates: Gronwall envelopes, diffusion horizon, eps^k order.

For a kink approximation with |w_xxt| <= beta, the remainder envelope
r(t) = sup_x |v(x, t)| obeys

    r(t) <= (1/a) int_0^t r + (beta/a) eps t
         => r(t) <= beta eps (e^{t/a} - 1)           (exact Gronwall solution)
         <= [beta (T/a) e^{T/a}] eps  for t <= T     (uniform bound)
         <= beta e^{2T/a} eps         (since x e^x <= e^{2x})

Choosing the horizon T_eps = (a/2) ln(1/(beta eps^{1-k})) for any 0 < k < 1
makes beta e^{2 T_eps/a} eps = eps^k exactly, so diffusion effects stay
below eps^k on [0, T_eps].  The sweep below measures r(t) with the Picard
solver for a list of eps values and checks the whole chain.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import MediumParams, SpaceTimeGrid
from .volterra import PicardConfig, picard_solve, DivergenceError


class HorizonError(ValueError):
    """T_eps <= 0: the asymptotic regime is not reached for this eps."""


@dataclass(frozen=True)
class LayerParams:
    """Sweep configuration for the eps^k verification."""

    beta: float
    a: float
    k_exp: float
    epsilon_list: tuple

    def __post_init__(self):
        if not 0.0 < self.k_exp < 1.0:
            raise ValueError(f"k_exp must lie in (0, 1), got {self.k_exp}")
        if self.beta <= 0.0 or self.a <= 0.0:
            raise ValueError("beta and a must be > 0")
        eps = tuple(float(e) for e in self.epsilon_list)
        if not eps:
            raise ValueError("epsilon_list must not be empty")
        if any(e <= 0.0 for e in eps):
            raise ValueError("epsilon values must be > 0")
        if list(eps) != sorted(eps, reverse=True):
            raise ValueError("epsilon_list must be sorted descending")
        object.__setattr__(self, "epsilon_list", eps)


@dataclass
class LayerReport:
    """Per-epsilon record of the measured envelope and the bound chain."""

    epsilon: float
    t: np.ndarray | None = None
    r: np.ndarray | None = None
    gronwall_uniform: float = math.nan     # beta (T/a) e^{T/a} eps, T = horizon used
    bound_6_12: float = math.nan           # beta e^{2T/a} eps
    eps_k: float = math.nan
    T_eps: float = math.nan
    horizon_used: float = math.nan
    horizon_reached: bool = True
    bound_satisfied: bool = False
    converged: bool = False
    max_r: float = math.nan
    slope: float | None = None
    error: str | None = None

    def to_dict(self):
        out = {
            "epsilon": self.epsilon,
            "T_eps": self.T_eps,
            "horizon_used": self.horizon_used,
            "horizon_reached": self.horizon_reached,
            "gronwall_uniform": self.gronwall_uniform,
            "bound_6_12": self.bound_6_12,
            "eps_k": self.eps_k,
            "max_r": self.max_r,
            "bound_satisfied": bool(self.bound_satisfied),
            "converged": bool(self.converged),
            "slope": self.slope,
            "error": self.error,
        }
        if self.t is not None:
            out["sup_history"] = [[float(a), float(b)] for a, b in zip(self.t, self.r)]
        return out


def gronwall_envelope(t, T, beta, a, epsilon):
    """Uniform Gronwall bound beta (T/a) e^{T/a} eps, valid for 0 <= t <= T."""
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0.0) or np.any(t > T * (1.0 + 1e-12)):
        raise ValueError("envelope is stated for 0 <= t <= T")
    val = beta * (T / a) * math.exp(T / a) * epsilon
    return val if t.ndim == 0 else np.full(t.shape, val)


def gronwall_envelope_exact(t, beta, a, epsilon):
    """Sharper pointwise bound beta eps (e^{t/a} - 1), the Gronwall equality case."""
    t = np.asarray(t, dtype=np.float64)
    out = beta * epsilon * (np.exp(t / a) - 1.0)
    return float(out) if out.ndim == 0 else out


def t_epsilon(a, beta, epsilon, k_exp):
    """Diffusion horizon (a/2) ln(1/(beta eps^{1-k})); raises if negative."""
    if not 0.0 < k_exp < 1.0:
        raise ValueError(f"k_exp must lie in (0, 1), got {k_exp}")
    arg = beta * epsilon ** (1.0 - k_exp)
    if arg > 1.0:
        raise HorizonError(
            f"beta*eps^(1-k) = {arg:.4g} > 1: horizon not reached for eps={epsilon}")
    return 0.5 * a * math.log(1.0 / arg) if arg < 1.0 else 0.0


def horizon_identity_error(a, beta, epsilon, k_exp):
    """Relative error of beta e^{2 T_eps/a} eps = eps^k (exact by construction)."""
    T = t_epsilon(a, beta, epsilon, k_exp)
    lhs = beta * math.exp(2.0 * T / a) * epsilon
    rhs = epsilon**k_exp
    return abs(lhs - rhs) / rhs


def _run_entry(eps, params_base, wave, grid, layer, horizon_cap, config, use_numba):
    rep = LayerReport(epsilon=eps)
    beta, a, k = layer.beta, layer.a, layer.k_exp
    try:
        rep.T_eps = t_epsilon(a, beta, eps, k)
    except HorizonError as exc:
        rep.horizon_reached = False
        rep.error = str(exc)
        return rep
    params = MediumParams(epsilon=eps, a=params_base.a, c=params_base.c,
                          gamma=params_base.gamma)
    horizon = min(rep.T_eps, horizon_cap, grid.t_max)
    rep.horizon_used = horizon
    nt = max(2, int(math.floor(grid.t_max / grid.dt + 1e-9)) + 1)
    try:
        v, solve_rep = picard_solve(wave, params, grid,
                                    config=config, use_numba=use_numba)
    except DivergenceError as exc:
        rep.error = f"solver diverged: {exc}"
        return rep
    rep.converged = solve_rep.converged
    rep.t = solve_rep.sup_history[:, 0]
    rep.r = solve_rep.sup_history[:, 1]
    rep.max_r = float(np.max(rep.r))
    T_full = grid.t_max
    rep.gronwall_uniform = beta * (T_full / a) * math.exp(T_full / a) * eps
    rep.bound_6_12 = beta * math.exp(2.0 * horizon / a) * eps
    rep.eps_k = eps**k
    in_horizon = rep.t <= horizon + 1e-12
    slack = 10.0 * config.fix_tol
    rep.bound_satisfied = bool(
        np.all(rep.r[in_horizon] <= rep.bound_6_12 + slack)
        and np.all(rep.r[in_horizon] <= rep.eps_k + slack)
        and np.all(rep.r <= rep.gronwall_uniform + slack)
    )
    return rep


def verify_order(params_base, wave, grid, layer, horizon_cap=None,
                 config=None, threads=1, use_numba=None):
    """Run the eps sweep; returns a list of LayerReport, slope filled in.

    Each entry solves the remainder equation, measures r(t) = sup_x |v|, and
    checks it against beta e^{2T/a} eps and eps^k on [0, min(T_eps, cap)],
    and against the uniform Gronwall envelope on the whole grid horizon.
    The slope of log(max_t r) vs log(eps) is fitted over the entries that
    ran (expected ~1: the envelope is linear in eps).
    """
    config = config or PicardConfig()
    if horizon_cap is None:
        horizon_cap = 4.0 * layer.a
    args = [(eps, params_base, wave, grid, layer, horizon_cap, config, use_numba)
            for eps in layer.epsilon_list]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda ar: _run_entry(*ar), args))
    else:
        reports = [_run_entry(*ar) for ar in args]
    ran = [r for r in reports if r.converged and np.isfinite(r.max_r) and r.max_r > 0]
    if len(ran) >= 2:
        slope = float(np.polyfit(np.log([r.epsilon for r in ran]),
                                 np.log([r.max_r for r in ran]), 1)[0])
        for r in reports:
            r.slope = slope
    return reports
