"""Precomputed kernel tables for the space-time convolution.

The kernel depends on (x - xi, t - tau) only, so an (nx offsets) x (nt lags)
table supports the full double convolution.  Two build modes:

* ``operator``: the table backs the discrete convolution.  Cells near the
  wave front |y| = c*lag hold the cell-averaged kernel (the front is
  narrower than dx there and a point sample would misrepresent the cell
  mass); lags small enough that the whole kernel column is narrower than a
  cell are skipped, because the convolution applies them pointwise through
  the exact mass (1/a)(1 - e^{-a lag}).
* ``pointwise``: plain k_time samples (table dumps, nonnegativity sweeps).

The builder runs as a numba prange loop when available; otherwise a
vectorized numpy path evaluates each entry with all quadrature nodes
batched into array operations.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._accel import HAVE_NUMBA, njit, prange
from .kernel import _GL12, _GL16, _k_fixed, _k_point_numpy, _LN_WINDOW
from .model import MediumParams, SpaceTimeGrid

_CELL_NODES = np.polynomial.legendre.leggauss(6)
_FRONT_PAD = 3.0


def small_lag_count(grid, params):
    """Lags whose kernel column is narrower than ~0.75 dx act pointwise."""
    c = params.c
    return max(1, int(math.ceil(0.75 * grid.dx / (c * grid.dt))))


@dataclass(frozen=True)
class KernelTable:
    """Kernel samples K[d, l] at offsets d*dx and lags l*dt."""

    grid: SpaceTimeGrid
    params: MediumParams
    values: np.ndarray = field(repr=False)
    mode: str = "operator"
    small_lags: int = 0

    def __post_init__(self):
        if self.values.shape != (self.grid.nx, self.grid.nt):
            raise ValueError(
                f"table shape {self.values.shape} != {(self.grid.nx, self.grid.nt)}"
            )
        if self.mode not in ("operator", "pointwise"):
            raise ValueError(f"unknown table mode {self.mode!r}")

    @property
    def offsets(self):
        return np.arange(self.grid.nx) * self.grid.dx

    @property
    def lags(self):
        return np.arange(self.grid.nt) * self.grid.dt


# ---------------------------------------------------------------------------
# compiled path
# ---------------------------------------------------------------------------

@njit(cache=True, parallel=True)
def _build_njit(offsets, lags, dx, a, b, eps, skip_lags, front_pad,
                cell_x, cell_w, glx, glw, glx_u, glw_u):
    nd = len(offsets)
    nl = len(lags)
    c = math.sqrt(eps * b)
    out = np.zeros((nd, nl), np.float64)
    for d in prange(nd):
        y = offsets[d]
        for l in range(nl):
            t = lags[l]
            if t <= 0.0 or l <= skip_lags:
                continue
            smear = math.sqrt(eps * t)
            if front_pad > 0.0 and abs(y - c * t) <= front_pad * (smear + dx) + dx:
                acc = 0.0
                for q in range(len(cell_x)):
                    yy = abs(y + 0.5 * dx * cell_x[q])
                    acc += 0.5 * cell_w[q] * _k_fixed(
                        yy, t, a, b, eps, _LN_WINDOW, 1.0, glx, glw, glx_u, glw_u)
                out[d, l] = acc
            else:
                out[d, l] = _k_fixed(y, t, a, b, eps, _LN_WINDOW, 1.0,
                                     glx, glw, glx_u, glw_u)
    return out


# ---------------------------------------------------------------------------
# numpy fallback path
# ---------------------------------------------------------------------------

def _build_numpy(offsets, lags, dx, a, b, eps, skip_lags, front_pad):
    nd, nl = len(offsets), len(lags)
    c = math.sqrt(eps * b)
    out = np.zeros((nd, nl), np.float64)
    cx, cw = _CELL_NODES
    for l in range(nl):
        t = lags[l]
        if t <= 0.0 or l <= skip_lags:
            continue
        smear = math.sqrt(eps * t)
        for d in range(nd):
            y = offsets[d]
            if front_pad > 0.0 and abs(y - c * t) <= front_pad * (smear + dx) + dx:
                acc = 0.0
                for q in range(len(cx)):
                    acc += 0.5 * cw[q] * _k_point_numpy(abs(y + 0.5 * dx * cx[q]), t, a, b, eps)
                out[d, l] = acc
            else:
                out[d, l] = _k_point_numpy(y, t, a, b, eps)
    return out


def build_kernel_table(params, grid, mode="operator", use_numba=None):
    """Build the kernel table for a grid; dispatches compiled/numpy paths."""
    m = params.medium if hasattr(params, "medium") else params
    offsets = np.arange(grid.nx) * grid.dx
    lags = np.arange(grid.nt) * grid.dt
    if mode == "operator":
        skip = small_lag_count(grid, m)
        pad = _FRONT_PAD
    else:
        skip = 0
        pad = 0.0
    use = HAVE_NUMBA if use_numba is None else use_numba
    if use:
        vals = _build_njit(offsets, lags, grid.dx, m.a, m.b, m.epsilon, skip, pad,
                           *_CELL_NODES, *_GL16, *_GL12)
    else:
        vals = _build_numpy(offsets, lags, grid.dx, m.a, m.b, m.epsilon, skip, pad)
    return KernelTable(grid=grid, params=m, values=vals, mode=mode,
                       small_lags=skip if mode == "operator" else 0)
