"""psglab: numerical laboratory for the viscously perturbed sine-Gordon equation.

Evaluates the fundamental solution of eps*d_xxt + c^2*d_xx - d_tt - a*d_t,
generates exact travelling waves of the reduced telegraph equation, solves
the remainder integral equation by windowed Picard iteration, and verifies
the boundary-layer estimates (diffusion effects of order eps^k up to the
horizon T_eps).
"""

__version__ = "0.1.0"

from ._accel import HAVE_NUMBA, using_numba
from .model import (GridFunction, MediumParams, SpaceTimeGrid,
                    lipschitz_bound_check, load_config, save_config,
                    source_superconductive)
from .waves import (Regime, SingularPointError, TravellingWave, kink_initial_data,
                    parallelism_angle, profile_ode_residual, reduced_residual,
                    w_xxt_bound, wave_derivatives, wave_value)
from .kernel import (KernelParams, QuadratureError, QuadratureSpec, g_origin,
                     g_time, ghat, k_origin, k_time, kernel_mass,
                     kernel_mass_exact, kernel_mass_hat, khat, pde_residual,
                     verify_laplace_pair)
from .table import KernelTable, build_kernel_table
from .volterra import (DivergenceError, PicardConfig, SolveReport,
                       convolve_kernel, picard_solve, sup_norm)
from .estimates import (HorizonError, LayerParams, LayerReport,
                        gronwall_envelope, gronwall_envelope_exact,
                        horizon_identity_error, t_epsilon, verify_order)
from .fd_oracle import (FdScheme, InstabilityError, cross_validate,
                        fd_solve_full, fd_solve_reduced, sine_gordon_source)
