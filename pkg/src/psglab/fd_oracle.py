"""Direct finite-difference solver for the full and reduced problems.

Independent of the kernel/Picard pipeline; used to cross-validate it.

Scheme (three time levels, theta-weighted implicit treatment of the stiff
terms, sine source explicit):

    u_tt  -> (u+ - 2u0 + u-)/dt^2          u_t -> (u+ - u-)/(2 dt)
    u_xx  -> D2[theta u+ + (1-2 theta) u0 + theta u-]
    u_xxt -> D2[theta (u+ - u0) + (1-theta)(u0 - u-)]/dt

theta = 1/2 makes both stiff terms time-centered (second order).  The
implicit part is linear and tridiagonal; each step is one banded solve.
Boundaries are Dirichlet, pinned to the initial trace (the far-field
constants of a kink) or to the travelling wave's trace.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .model import GridFunction, SpaceTimeGrid
from . import waves as _waves


class InstabilityError(RuntimeError):
    """Sup-norm blow-up detected during time stepping."""


@dataclass(frozen=True)
class FdScheme:
    """Step sizes, implicitness weight, and the explicit-part CFL check."""

    dx: float
    dt: float
    theta: float = 0.5
    safety: float = 0.9

    def __post_init__(self):
        if self.dx <= 0.0 or self.dt <= 0.0:
            raise ValueError("dx and dt must be > 0")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")

    @classmethod
    def from_grid(cls, grid, params, theta=0.5, safety=0.9):
        scheme = cls(dx=grid.dx, dt=grid.dt, theta=theta, safety=safety)
        scheme.check_cfl(params.c)
        return scheme

    def dt_limit(self, c):
        return self.safety * self.dx / c

    def check_cfl(self, c):
        if self.dt > self.dt_limit(c) * (1.0 + 1e-12):
            raise ValueError(
                f"dt = {self.dt:.4g} violates the explicit-part bound "
                f"{self.dt_limit(c):.4g} (= {self.safety} dx / c)")

    def cfl_report(self, c):
        return {"dx": self.dx, "dt": self.dt, "c": c, "theta": self.theta,
                "dt_limit": self.dt_limit(c), "ratio": self.dt / self.dt_limit(c)}


def _march(eps, a, c, f0_vals, f1_vals, source, grid, scheme, bc):
    """Shared stepping loop; ``source(u, t)`` is evaluated explicitly."""
    scheme.check_cfl(c)
    nx, nt = grid.nx, grid.nt
    dx, dt = grid.dx, grid.dt
    x = grid.x
    t = grid.t
    theta = scheme.theta
    u = np.zeros((nx, nt))
    u[:, 0] = f0_vals

    def d2(vec):
        out = np.zeros_like(vec)
        out[1:-1] = (vec[2:] - 2.0 * vec[1:-1] + vec[:-2]) / dx**2
        return out

    # Taylor startup with u_tt from the equation at t = 0
    utt0 = eps * d2(f1_vals) + c * c * d2(f0_vals) - a * f1_vals - source(f0_vals, 0.0)
    u[:, 1] = f0_vals + dt * f1_vals + 0.5 * dt * dt * utt0
    u[0, 1] = bc(x[0], t[1])
    u[-1, 1] = bc(x[-1], t[1])

    w_imp = eps * theta / dt + c * c * theta
    ab = np.zeros((3, nx))
    ab[0, 1:] = -w_imp / dx**2
    ab[2, :-1] = -w_imp / dx**2
    ab[1] = 1.0 / dt**2 + a / (2.0 * dt) + 2.0 * w_imp / dx**2
    ab[1, 0] = ab[1, -1] = 1.0
    ab[0, 1] = 0.0
    ab[2, -2] = 0.0

    blow = 1e6 * (1.0 + float(np.max(np.abs(f0_vals))))
    for n in range(1, nt - 1):
        un = u[:, n]
        um = u[:, n - 1]
        rhs = ((2.0 * un - um) / dt**2 + a * um / (2.0 * dt)
               + eps * d2((1.0 - 2.0 * theta) * un - (1.0 - theta) * um) / dt
               + c * c * d2((1.0 - 2.0 * theta) * un + theta * um)
               - source(un, t[n]))
        rhs[0] = bc(x[0], t[n + 1])
        rhs[-1] = bc(x[-1], t[n + 1])
        u[:, n + 1] = sla.solve_banded((1, 1), ab, rhs)
        mx = float(np.max(np.abs(u[:, n + 1])))
        if mx > blow:
            raise InstabilityError(
                f"sup |u| = {mx:.3e} at t = {t[n+1]:.4g} exceeds the blow-up "
                f"threshold; refine dt or increase theta")
    return GridFunction(grid=grid, values=u)


def _make_bc(bc_mode, f0, wave, a):
    if bc_mode == "pin":
        return lambda xv, tv: float(f0(xv)) if callable(f0) else f0
    if bc_mode == "wave":
        if wave is None:
            raise ValueError("bc_mode='wave' needs a wave to trace")
        return lambda xv, tv: float(_waves.wave_value(wave, xv, tv))
    raise ValueError(f"unknown bc_mode {bc_mode!r}")


def fd_solve_full(params, f0, f1, source, grid, scheme=None, bc_mode="pin", wave=None):
    """March the full equation eps u_xxt + c^2 u_xx - u_tt - a u_t = source(u, t).

    ``f0``/``f1`` are callables of x (initial value and velocity); ``source``
    maps (u array, t) to the array f(x, t, u).  Boundary values are pinned to
    f0's trace or follow a travelling wave (bc_mode='wave').
    """
    scheme = scheme or FdScheme.from_grid(grid, params)
    x = grid.x
    return _march(params.epsilon, params.a, params.c, np.asarray(f0(x), dtype=float),
                  np.asarray(f1(x), dtype=float), source, grid, scheme,
                  _make_bc(bc_mode, f0, wave, params.a))


def fd_solve_reduced(params, f0, f1, source, grid, scheme=None, bc_mode="pin", wave=None):
    """Same stepping with the third-order term removed (telegraph equation)."""
    scheme = scheme or FdScheme.from_grid(grid, params)
    x = grid.x
    return _march(0.0, params.a, params.c, np.asarray(f0(x), dtype=float),
                  np.asarray(f1(x), dtype=float), source, grid, scheme,
                  _make_bc(bc_mode, f0, wave, params.a))


def sine_gordon_source(params):
    """f(u) = sin u + gamma, the superconductive right-hand side."""
    gamma = params.gamma

    def source(u, t):
        return np.sin(u) + gamma

    return source


def cross_validate(params, wave, grid, refine_x=5, refine_t=1, config=None,
                   theta=0.5, use_numba=None):
    """Compare the direct solve of the full equation with w + v from Picard.

    The finite-difference run uses a grid refined refine_x-by-refine_t (so
    its CFL bound holds and its own error stays inside the tolerance), then
    both solutions are compared on the coarse nodes.  Returns a report dict;
    'passed' applies the tolerance max(1e-3, 5 * (dx_fd^2 + dt_fd^2)).
    """
    from .volterra import picard_solve

    fine = grid.refine(refine_x, refine_t)
    scheme = FdScheme.from_grid(fine, params, theta=theta)
    f0 = lambda xv: _waves.wave_value(wave, xv, 0.0)
    f1 = lambda xv: _waves.wave_derivatives(wave, xv, 0.0).w_t
    u_fd = fd_solve_full(params, f0, f1, sine_gordon_source(params), fine,
                         scheme=scheme)
    v, solve_rep = picard_solve(wave, params, grid, config=config, use_numba=use_numba)
    X, T = np.meshgrid(grid.x, grid.t, indexing="ij")
    W = _waves.wave_value(wave, X, T)
    u_coarse = u_fd.values[::refine_x, ::refine_t]
    disc = float(np.max(np.abs(u_coarse - (W + v.values))))
    tol = max(1e-3, 5.0 * (fine.dx**2 + fine.dt**2))
    return {
        "sup_discrepancy": disc,
        "tolerance": tol,
        "passed": bool(disc < tol),
        "fd_grid": {"nx": fine.nx, "nt": fine.nt, "dx": fine.dx, "dt": fine.dt},
        "picard_converged": solve_rep.converged,
        "picard_iterations": list(solve_rep.iterations),
        "cfl": scheme.cfl_report(params.c),
    }
