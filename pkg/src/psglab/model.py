"""Medium parameters, space-time grids, and the superconductive source term.

The third-order operator under study is

    L u = eps * u_xxt + c^2 * u_xx - u_tt - a * u_t,

with positive constants eps (diffusion), a (damping) and c (wave speed).
The remainder v = u - w of a travelling-wave approximation w solves
L v = F with zero initial data, where F is the superconductive source
built here.
"""

import math
from dataclasses import dataclass, field

import numpy as np

CONFIG_KEYS = ("epsilon", "a", "c", "gamma", "x_min", "x_max", "nx", "t_max", "nt")
_INT_KEYS = ("nx", "nt")


@dataclass(frozen=True)
class MediumParams:
    """Physical constants of the medium.

    b = c^2/eps is the derived stiffness rate; the kernel is nonnegative in
    the dissipative regime a < b, i.e. a*eps < c^2.
    """

    epsilon: float
    a: float
    c: float
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("epsilon", "a", "c"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {val}")
        if not math.isfinite(self.gamma):
            raise ValueError("gamma must be finite")
        if not math.isfinite(self.b):
            raise ValueError("b = c^2/epsilon must be finite")

    @property
    def b(self):
        return self.c**2 / self.epsilon

    @property
    def dissipative_regime(self):
        """a < b, equivalently a*eps < c^2."""
        return self.a * self.epsilon < self.c**2


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Uniform rectangle [x_min, x_max] x [0, t_max], sampled nx-by-nt."""

    x_min: float
    x_max: float
    nx: int
    t_max: float
    nt: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if self.nx < 2 or self.nt < 2:
            raise ValueError("nx and nt must both be >= 2")
        if not (math.isfinite(self.t_max) and self.t_max > 0.0):
            raise ValueError(f"t_max must be finite and > 0, got {self.t_max}")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dt(self):
        return self.t_max / (self.nt - 1)

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def t(self):
        return np.linspace(0.0, self.t_max, self.nt)

    def refine(self, rx=1, rt=1):
        """Grid with the same extent and every cell split rx-by-rt."""
        return SpaceTimeGrid(self.x_min, self.x_max, (self.nx - 1) * rx + 1,
                             self.t_max, (self.nt - 1) * rt + 1)


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function on a grid, space-major: values[i, n] = f(x_i, t_n)."""

    grid: SpaceTimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.grid.nx, self.grid.nt):
            raise ValueError(
                f"values shape {vals.shape} != grid shape {(self.grid.nx, self.grid.nt)}"
            )
        if not np.isfinite(vals).all():
            raise ValueError("grid function contains non-finite samples")
        object.__setattr__(self, "values", vals)


def source_superconductive(x, t, v, wave, params):
    """Source term of the remainder problem: sin(v + w) - sin(w) - eps*w_xxt.

    Accepts scalars or broadcastable arrays in (x, t, v).  1-Lipschitz in v
    since sine is 1-Lipschitz.
    """
    from . import waves

    w = waves.wave_value(wave, x, t)
    w_xxt = waves.wave_derivatives(wave, x, t).w_xxt
    return np.sin(v + w) - np.sin(w) - params.epsilon * w_xxt


def lipschitz_bound_check(wave, params, samples):
    """Worst observed ratio |F(v1) - F(v2)| / |v1 - v2| over sample tuples.

    ``samples`` is an (n, 4) array of rows (x, t, v1, v2); rows with v1 == v2
    are skipped.  For the superconductive source the result is <= 1.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or samples.shape[1] != 4:
        raise ValueError("samples must be an (n, 4) array of (x, t, v1, v2)")
    x, t, v1, v2 = samples.T
    keep = v1 != v2
    if not keep.any():
        raise ValueError("no sample tuples with v1 != v2")
    x, t, v1, v2 = x[keep], t[keep], v1[keep], v2[keep]
    f1 = source_superconductive(x, t, v1, wave, params)
    f2 = source_superconductive(x, t, v2, wave, params)
    return float(np.max(np.abs(f1 - f2) / np.abs(v1 - v2)))


def parse_config_text(text):
    """Parse ``key = value`` lines (# comments allowed) into a dict.

    Unknown keys are rejected; values are floats except nx/nt (ints).
    """
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        try:
            out[key] = int(value) if key in _INT_KEYS else float(value)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key!r}: {value!r}") from exc
    return out


def load_config(path):
    """Read a flat config file; returns (MediumParams, SpaceTimeGrid).

    Both sections must be complete: epsilon, a, c, gamma and
    x_min, x_max, nx, t_max, nt.
    """
    with open(path, encoding="utf-8") as fh:
        raw = parse_config_text(fh.read())
    missing = [k for k in CONFIG_KEYS if k not in raw]
    if missing:
        raise ValueError(f"config missing keys: {', '.join(missing)}")
    params = MediumParams(raw["epsilon"], raw["a"], raw["c"], raw["gamma"])
    grid = SpaceTimeGrid(raw["x_min"], raw["x_max"], raw["nx"], raw["t_max"], raw["nt"])
    return params, grid


def save_config(path, params, grid):
    """Write params and grid as a flat ``key = value`` file."""
    lines = ["# psglab configuration"]
    for key in ("epsilon", "a", "c", "gamma"):
        lines.append(f"{key} = {getattr(params, key)!r}")
    for key in ("x_min", "x_max", "nx", "t_max", "nt"):
        lines.append(f"{key} = {getattr(grid, key)!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
